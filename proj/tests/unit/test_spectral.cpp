#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "levy/spectral.hpp"

using namespace levy;
using std::numbers::pi;

namespace {

// Dense matrix of a grid operator, column by column.
Eigen::MatrixXd dense(const Hamiltonian& H) {
  const int n = H.size();
  Eigen::MatrixXd A(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1;
    H.apply(e.data(), col.data());
    for (int i = 0; i < n; ++i) A(i, j) = col[i];
    e[j] = 0;
  }
  return 0.5 * (A + A.transpose());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("free operator on a plane wave") {
  auto m = presets::stable(1, 1.0);
  Grid1D g(16, 256);
  Hamiltonian H(m, Potential(), g);
  for (int j : {1, 5, 40}) {
    std::vector<double> phi(g.N);
    for (int k = 0; k < g.N; ++k) phi[k] = std::cos(g.xi(j) * g.x(k));
    auto out = H.apply(phi);
    double worst = 0;
    for (int k = 0; k < g.N; ++k) worst = std::max(worst, std::abs(out[k] - m.psi(g.xi(j)) * phi[k]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("diffusion limit is minus a times the Laplacian") {
  const double a = 0.7;
  auto m = presets::diffusion_dominated(1, a);
  Grid1D g(16, 512);
  Hamiltonian H(m, Potential(), g);
  std::vector<double> phi(g.N);
  for (int k = 0; k < g.N; ++k) phi[k] = std::exp(-g.x(k) * g.x(k));
  auto out = H.apply(phi);
  const double h = g.h();
  double worst = 0;
  for (int k = 1; k + 1 < g.N; ++k) {
    double fd = -a * (phi[k + 1] - 2 * phi[k] + phi[k - 1]) / (h * h);
    worst = std::max(worst, std::abs(out[k] - fd));
  }
  // second-order difference error is about a h^2 max|phi''''| / 12
  CHECK(worst < a * h * h * 12 / 12 * 1.1);
}

TEST_CASE("Hamiltonian is symmetric") {
  auto m = presets::subexponential(1, 1, 1, 0.5, 0);
  Grid1D g(24, 1024);
  Hamiltonian H(m, Potential(pot::PoschlTeller{3, 1}), g);
  std::vector<double> u(g.N), v(g.N);
  for (int k = 0; k < g.N; ++k) {
    u[k] = std::exp(-0.1 * g.x(k) * g.x(k)) * (1 + g.x(k));
    v[k] = 1 / (1 + g.x(k) * g.x(k));
  }
  double a = dot(u, H.apply(v)), b = dot(H.apply(u), v);
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
}

TEST_CASE("free operator has no discrete ground state") {
  Hamiltonian H(presets::stable(1, 1.0), Potential(), Grid1D(32, 1024));
  auto r = ground_state(H);
  CHECK(std::abs(r.eigenvalues.at(0)) < 1e-8);
  CHECK(r.no_discrete_ground_state);
  double lo = *std::min_element(r.vectors[0].begin(), r.vectors[0].end());
  double hi = *std::max_element(r.vectors[0].begin(), r.vectors[0].end());
  CHECK(hi - lo < 1e-6 * std::abs(hi));
}

TEST_CASE("ground state against dense diagonalization") {
  Hamiltonian H(presets::stable(1, 1.0), Potential(pot::Well{2, 1}), Grid1D(32, 1024));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(H), Eigen::EigenvaluesOnly);
  auto r = excited_states(H, 2);
  REQUIRE(r.eigenvalues.size() >= 1);
  CHECK(r.eigenvalues[0] < 0);
  CHECK(r.eigenvalues[0] == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));
  CHECK(r.residuals[0] < 1e-6);
  CHECK(r.min_phi0 > 0);
}

TEST_CASE("square well with pure diffusion") {
  // -a phi'' - 2 phi = lambda phi on |x| <= 1, -a phi'' = lambda phi outside; even state: k tan k = kappa
  const double a = 0.5;
  auto f = [a](double lam) {
    double k = std::sqrt((2 + lam) / a), kappa = std::sqrt(-lam / a);
    return k * std::tan(k) - kappa;
  };
  boost::math::tools::eps_tolerance<double> tol(50);
  // k < pi/2 for the ground state: lambda in (-2, -2 + a (pi/2)^2)
  auto root = boost::math::tools::bisect(f, -2 + 1e-12, std::min(-1e-12, -2 + a * pi * pi / 4 - 1e-12), tol);
  const double exact = 0.5 * (root.first + root.second);

  // L chosen so the well edges x = +-1 fall midway between nodes; the step then costs O(h^2)
  const int N = 1 << 14;
  Grid1D g(double(N) / 2049, N);
  Hamiltonian H(presets::diffusion_dominated(1, a), Potential(pot::Well{2, 1}), g);
  auto r = ground_state(H);
  CHECK(r.eigenvalues[0] == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("excited states: parity, ordering and shallow wells") {
  Grid1D g(32, 1024);
  Hamiltonian deep(presets::stable(1, 1.0), Potential(pot::Well{8, 0.5}), g);
  auto r = excited_states(deep, 2);
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues[0] < r.eigenvalues[1]);
  CHECK(r.eigenvalues[1] < 0);
  std::vector<double> even(g.N);
  for (int k = 0; k < g.N; ++k) even[k] = std::exp(-g.x(k) * g.x(k));
  CHECK(std::abs(dot(r.vectors[1], even)) * g.h() < 1e-8);

  Hamiltonian shallow(presets::stable(1, 1.0), Potential(pot::Well{0.3, 1}), g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(shallow), Eigen::EigenvaluesOnly);
  auto s = excited_states(shallow, 2);
  CHECK(s.eigenvalues.size() == 1);
  CHECK(s.fewer_than_requested);
  CHECK(s.eigenvalues[0] == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));
  CHECK(es.eigenvalues()(1) > -s.floor);
}

TEST_CASE("Dirichlet eigenvalues of balls") {
  auto st = presets::stable(1, 1.0);
  Grid1D g(32, 2048);
  Hamiltonian H(st, Potential(), g);
  double m1 = dirichlet_mu(H, 1), m2 = dirichlet_mu(H, 2), m4 = dirichlet_mu(H, 4);
  CHECK(m1 > m2);
  CHECK(m2 > m4);
  // projected dense matrix on the interior nodes
  Hamiltonian small(st, Potential(), Grid1D(32, 1024));
  Eigen::MatrixXd A = dense(small);
  std::vector<int> in;
  for (int k = 0; k < small.size(); ++k)
    if (std::abs(small.grid().x(k)) < 1) in.push_back(k);
  Eigen::MatrixXd B(in.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = 0; j < in.size(); ++j) B(i, j) = A(in[i], in[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  CHECK(dirichlet_mu(small, 1) == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-4));

  const double a = 0.5, r = 1.5;
  Hamiltonian D(presets::diffusion_dominated(1, a), Potential(), Grid1D(32, 1 << 14));
  CHECK(dirichlet_mu(D, r) == doctest::Approx(a * std::pow(pi / (2 * r), 2)).epsilon(1e-3));
}

TEST_CASE("small eigenvalue bound") {
  Grid1D g(32, 1024);
  auto st = presets::stable(1, 1.0);
  Hamiltonian H(st, Potential(pot::Well{2, 1}), g);
  auto gs = ground_state(H);
  auto rows = smallev_check(H, gs.eigenvalues[0], {1});
  REQUIRE(rows.size() == 1);
  // V vanishes on part of B(0, 2), so the sup/inf over 2r give the bound mu_1
  CHECK(rows[0].bound == doctest::Approx(rows[0].mu));
  CHECK(rows[0].pass);
  // the sharper reading with the well depth also holds here
  CHECK(gs.eigenvalues[0] <= -2 + rows[0].mu);

  Hamiltonian pt(st, Potential(pot::PoschlTeller{3, 1}), g);
  auto gp = ground_state(pt);
  for (const auto& row : smallev_check(pt, gp.eigenvalues[0], {1, 2, 4})) CHECK(row.pass);

  Hamiltonian free(st, Potential(), g);
  for (const auto& row : smallev_check(free, 0.0, {1, 2})) CHECK(row.pass);
}

TEST_CASE("Kato class diagnostic") {
  auto st = presets::stable(1, 1.0);
  std::vector<double> ts = {0.1, 0.05, 0.025, 0.0125};
  auto bounded = kato_diagnostic(st, Potential(pot::Well{2, 1}), ts);
  CHECK(bounded.verdict == "pass");
  for (std::size_t i = 0; i < bounded.t_set.size(); ++i) CHECK(bounded.curve[i] <= 2 * bounded.t_set[i] * (1 + 1e-6));
  CHECK(kato_diagnostic(st, Potential(pot::Coulomb{1, 1, 0.5, 1}), ts).verdict == "pass");
  CHECK(kato_diagnostic(st, Potential(pot::Coulomb{1, 1, 1.0, 1}), ts).verdict == "inconclusive");
}
