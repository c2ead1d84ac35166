#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace levy {

template <class Acc>
std::vector<Acc> run_chunks(long n_paths, int workers, const std::function<void(long, long, long, Acc&)>& fn) {
  const long chunks = (n_paths + kChunk - 1) / kChunk;
  std::vector<Acc> out(chunks);
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (long c; (c = next.fetch_add(1)) < chunks;) {
      long begin = c * kChunk, end = std::min(n_paths, begin + kChunk);
      try {
        fn(c, begin, end, out[c]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    }
  };
  workers = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace levy
