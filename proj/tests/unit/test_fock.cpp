#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "core/error.hpp"
#include "core/fock.hpp"
#include "core/quadrature.hpp"

using namespace frictionlab;
using namespace frictionlab::fock;

namespace {

double binomial(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

quad::ModeSet random_modes(std::size_t count, std::size_t dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.4, 0.4), w(0.5, 2.0);
  quad::ModeSet set;
  set.particle_dim = dim;
  for (std::size_t j = 0; j < count; ++j) {
    quad::Mode m;
    m.omega = w(rng);
    m.coupling = Eigen::MatrixXd(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c <= r; ++c) m.coupling(r, c) = m.coupling(c, r) = u(rng);
    set.modes.push_back(m);
  }
  return set;
}

// Dense H straight from the definition: <f', a| H |f, b> with
// a*_j |.., n_j, ..> = sqrt(n_j + 1) |.., n_j + 1, ..>.
Eigen::MatrixXd dense_hamiltonian(const Eigen::VectorXd& e, const quad::ModeSet& modes, const FockBasis& fock) {
  const auto np = static_cast<std::size_t>(e.size());
  const auto dim = static_cast<Eigen::Index>(fock.size() * np);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t f = 0; f < fock.size(); ++f) {
    const auto occ = fock.occupation(f);
    double field = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) field += occ[j] * modes.modes[j].omega;
    for (std::size_t a = 0; a < np; ++a) h(f * np + a, f * np + a) = e(a) + field;
    for (std::size_t j = 0; j < modes.size(); ++j) {
      std::vector<std::uint8_t> up(occ.begin(), occ.end());
      ++up[j];
      const auto g = fock.index_of(up);
      if (!g) continue;
      const double amp = std::sqrt(static_cast<double>(occ[j]) + 1.0);
      for (std::size_t a = 0; a < np; ++a) {
        for (std::size_t b = 0; b < np; ++b) {
          const double v = amp * modes.modes[j].coupling(a, b);
          h(*g * np + a, f * np + b) += v;
          h(f * np + b, *g * np + a) += v;
        }
      }
    }
  }
  return h;
}

}  // namespace

TEST_CASE("Fock basis size, ordering and lookup") {
  for (std::size_t m : {1u, 3u, 6u}) {
    for (unsigned n : {0u, 1u, 3u}) {
      FockBasis fb(m, n);
      CHECK(fb.size() == static_cast<std::size_t>(binomial(static_cast<unsigned>(m) + n, n)));
      CHECK(FockBasis::dimension(m, n) == fb.size());
      std::set<std::vector<std::uint8_t>> seen;
      unsigned prev_degree = 0;
      for (std::size_t i = 0; i < fb.size(); ++i) {
        const auto occ = fb.occupation(i);
        std::vector<std::uint8_t> v(occ.begin(), occ.end());
        unsigned total = 0;
        for (auto x : v) total += x;
        CHECK(total == fb.degree(i));
        CHECK(total <= n);
        CHECK(fb.degree(i) >= prev_degree);
        prev_degree = fb.degree(i);
        CHECK(seen.insert(v).second);
        REQUIRE(fb.index_of(v).has_value());
        CHECK(*fb.index_of(v) == i);
      }
    }
  }
  FockBasis fb(3, 2);
  CHECK(fb.degree(0) == 0);
  CHECK(fb.raise(0, 1) != FockBasis::npos);
  CHECK(fb.occupation(fb.raise(0, 1))[1] == 1);
  const std::vector<std::uint8_t> cap{2, 0, 0};
  CHECK(fb.raise(*fb.index_of(cap), 0) == FockBasis::npos);
}

TEST_CASE("hand-built 1-mode, 2-level Hamiltonian") {
  // Fock states |0>, |1>, |2>; index f * 2 + a.
  Eigen::VectorXd e(2);
  e << 0.5, 1.7;
  quad::ModeSet modes;
  modes.particle_dim = 2;
  quad::Mode m;
  m.omega = 0.8;
  m.coupling = Eigen::MatrixXd(2, 2);
  m.coupling << 0.1, 0.3, 0.3, -0.2;
  modes.modes.push_back(m);
  FockBasis fb(1, 2);
  const auto h = build_hamiltonian(e, modes, fb);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(6, 6);
  for (int f = 0; f < 3; ++f)
    for (int a = 0; a < 2; ++a) ref(2 * f + a, 2 * f + a) = e(a) + 0.8 * f;
  for (int f = 0; f < 2; ++f) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        ref(2 * (f + 1) + a, 2 * f + b) = std::sqrt(f + 1.0) * m.coupling(a, b);
        ref(2 * f + b, 2 * (f + 1) + a) = std::sqrt(f + 1.0) * m.coupling(a, b);
      }
    }
  }
  CHECK((Eigen::MatrixXd(h.matrix()) - ref).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(h.asymmetry() == 0.0);
}

TEST_CASE("sparse Hamiltonian matches the dense definition") {
  Eigen::VectorXd e(3);
  e << 0.3, 1.1, 2.0;
  const auto modes = random_modes(4, 3, 5);
  FockBasis fb(4, 3);
  const auto h = build_hamiltonian(e, modes, fb);
  const auto ref = dense_hamiltonian(e, modes, fb);
  CHECK((Eigen::MatrixXd(h.matrix()) - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Lanczos ground state against dense diagonalization") {
  Eigen::VectorXd e(3);
  e << 0.3, 1.1, 2.0;
  const auto modes = random_modes(4, 3, 9);
  FockBasis fb(4, 3);
  const auto h = build_hamiltonian(e, modes, fb);
  const auto gs = ground_state(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(e, modes, fb));
  CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-11));
  CHECK(std::abs(std::abs(gs.vector.dot(es.eigenvectors().col(0))) - 1.0) < 1e-9);
  CHECK(gs.residual < 1e-9);
  // Same seed, same answer bit for bit.
  const auto again = ground_state(h);
  CHECK(again.energy == gs.energy);
}

TEST_CASE("observables of a hand-made state") {
  FockBasis fb(2, 2);
  const std::size_t np = 1;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fb.size()));
  const std::vector<std::uint8_t> s10{1, 0}, s02{0, 2};
  psi(0) = std::sqrt(0.5);
  psi(static_cast<Eigen::Index>(*fb.index_of(s10))) = std::sqrt(0.3);
  psi(static_cast<Eigen::Index>(*fb.index_of(s02))) = std::sqrt(0.2);
  GroundState gs;
  gs.vector = psi;
  const auto obs = observables(gs, fb, np);
  CHECK(obs.occupations[0] == doctest::Approx(0.3));
  CHECK(obs.occupations[1] == doctest::Approx(0.4));
  CHECK(obs.n_expect == doctest::Approx(0.7));
  CHECK(top_sector_weight(fb, np, psi) == doctest::Approx(0.2));
  CHECK(number_operator(fb, np).expectation(psi) == doctest::Approx(0.7));
}

TEST_CASE("Van Hove closed form") {
  const std::vector<double> w{1.5, 1.0}, g{0.3, 0.2};
  const auto modes = quad::ModeSet::scalar(w, g, 2);
  Eigen::VectorXd e(2);
  e << 0.5, 1.5;
  const auto ref = vanhove_reference(modes, 0.5);
  CHECK(ref.energy == doctest::Approx(0.5 - 0.09 / 1.5 - 0.04 / 1.0));
  CHECK(ref.occupations[0] == doctest::Approx(0.04));
  FockBasis fb(2, 10);
  const auto gs = solve(e, modes, fb);
  CHECK(gs.energy == doctest::Approx(ref.energy).epsilon(1e-12));
  CHECK(gs.top_sector_weight < 1e-12);
  const auto obs = observables(gs, fb, 2);
  CHECK(obs.occupations[1] == doctest::Approx(0.04).epsilon(1e-10));
  // Particle-dependent coupling has no closed form.
  auto bad = modes;
  bad.modes[0].coupling(0, 1) = bad.modes[0].coupling(1, 0) = 0.1;
  CHECK_THROWS_AS(vanhove_reference(bad, 0.5), PreconditionError);
}

TEST_CASE("pullthrough residual shrinks with the cutoff") {
  const std::vector<double> w{1.5, 1.0}, g{0.3, 0.2};
  const auto modes = quad::ModeSet::scalar(w, g, 2);
  Eigen::VectorXd e(2);
  e << 0.5, 1.5;
  double prev = 1e300;
  for (unsigned n : {2u, 4u, 6u}) {
    FockBasis fb(2, n);
    const auto h = build_hamiltonian(e, modes, fb);
    const auto gs = ground_state(h);
    const double r = pullthrough_residual(gs, h, fb, modes, 0);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("N_tau sample against dense operators") {
  const auto modes = random_modes(3, 2, 21);
  FockBasis fb(3, 3);
  const auto trials = random_trials(fb, 2, 5, 4);
  for (const auto& psi : trials) {
    // Trials never touch the top sector.
    CHECK(top_sector_weight(fb, 2, psi) == 0.0);
    CHECK(psi.norm() == doctest::Approx(1.0));
  }
  const auto& psi = trials[0];
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const auto ann_part = [&](std::size_t j) {
    // (B_j^T (x) a_j) from the dense definition: the lowering half of H_I for mode j.
    quad::ModeSet one;
    one.particle_dim = 2;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      quad::Mode m = modes.modes[k];
      m.omega = 0.0;
      if (k != j) m.coupling.setZero();
      one.modes.push_back(m);
    }
    Eigen::MatrixXd h = dense_hamiltonian(zero, one, fb);
    return Eigen::MatrixXd(h.triangularView<Eigen::StrictlyUpper>());
  };
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(psi.size());
  Eigen::MatrixXd bb = Eigen::MatrixXd::Zero(2, 2);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    sum += ann_part(j) * psi;
    bb += modes.modes[j].coupling * modes.modes[j].coupling.transpose() / modes.modes[j].omega;
  }
  const double hf = field_energy(modes, fb, 2).expectation(psi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bb);
  const auto s = ntau_sample(fb, modes, psi);
  CHECK(s.lhs == doctest::Approx(sum.squaredNorm()).epsilon(1e-12));
  CHECK(s.rhs == doctest::Approx(es.eigenvalues().maxCoeff() * hf).epsilon(1e-12));
  CHECK(s.margin() >= -1e-12);
  CHECK(check_ntau(fb, modes, trials).violations == 0);
}
