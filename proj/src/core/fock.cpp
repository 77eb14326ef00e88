#include "core/fock.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "core/error.hpp"

namespace frictionlab::fock {

namespace {

constexpr std::size_t kMaxFockDimension = 20'000'000;

// C(n, k) with saturation at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
  const long double rounded = std::floor(r + 0.5L);
  if (rounded > static_cast<long double>(static_cast<std::size_t>(-1) / 2)) {
    return static_cast<std::size_t>(-1);
  }
  return static_cast<std::size_t>(rounded);
}

// Vectors of `modes` non-negative entries summing to `total`.
std::size_t compositions(std::size_t modes, std::size_t total) {
  if (modes == 0) return total == 0 ? 1 : 0;
  return binomial(total + modes - 1, modes - 1);
}

void enumerate(std::size_t mode, unsigned remaining, std::vector<std::uint8_t>& current,
               std::vector<std::uint8_t>& out) {
  const std::size_t modes = current.size();
  if (mode + 1 == modes) {
    current[mode] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int v = static_cast<int>(remaining); v >= 0; --v) {
    current[mode] = static_cast<std::uint8_t>(v);
    enumerate(mode + 1, remaining - static_cast<unsigned>(v), current, out);
  }
  current[mode] = 0;
}

}  // namespace

std::size_t FockBasis::dimension(std::size_t modes, unsigned n_max) {
  return binomial(modes + n_max, n_max);
}

FockBasis::FockBasis(std::size_t modes, unsigned n_max) : m_modes(modes), m_n_max(n_max) {
  if (n_max > 255) throw PreconditionError("n_max above 255 is not supported");
  const std::size_t dim = modes == 0 ? 1 : dimension(modes, n_max);
  if (dim > kMaxFockDimension) {
    std::ostringstream msg;
    msg << "Fock dimension C(" << modes << " + " << n_max << ", " << n_max << ") = " << dim
        << " exceeds the limit " << kMaxFockDimension;
    throw PreconditionError(msg.str());
  }
  if (modes == 0) {
    m_degree.assign(1, 0);
    m_sector_start = {0, 1};
    return;
  }
  m_occupations.reserve(dim * modes);
  std::vector<std::uint8_t> current(modes, 0);
  for (unsigned s = 0; s <= n_max; ++s) {
    m_sector_start.push_back(m_occupations.size() / modes);
    enumerate(0, s, current, m_occupations);
  }
  m_sector_start.push_back(m_occupations.size() / modes);
  m_degree.resize(dim);
  for (unsigned s = 0; s <= n_max; ++s) {
    std::fill(m_degree.begin() + static_cast<std::ptrdiff_t>(m_sector_start[s]),
              m_degree.begin() + static_cast<std::ptrdiff_t>(m_sector_start[s + 1]),
              static_cast<std::uint8_t>(s));
  }
  m_raise.assign(dim * modes, npos);
  std::vector<std::uint8_t> scratch(modes);
  for (std::size_t i = 0; i < dim; ++i) {
    if (m_degree[i] >= n_max) continue;
    const auto occ = occupation(i);
    std::copy(occ.begin(), occ.end(), scratch.begin());
    for (std::size_t j = 0; j < modes; ++j) {
      ++scratch[j];
      m_raise[i * modes + j] = *index_of(scratch);
      --scratch[j];
    }
  }
}

std::optional<std::size_t> FockBasis::index_of(std::span<const std::uint8_t> occupation) const {
  if (occupation.size() != m_modes) return std::nullopt;
  std::size_t total = 0;
  for (auto v : occupation) total += v;
  if (total > m_n_max) return std::nullopt;
  if (m_modes == 0) return 0;
  // Rank inside the sector = number of vectors that are lexicographically larger.
  std::size_t rank = 0;
  std::size_t remaining = total;
  for (std::size_t i = 0; i + 1 < m_modes; ++i) {
    const std::size_t v = occupation[i];
    for (std::size_t larger = v + 1; larger <= remaining; ++larger) {
      rank += compositions(m_modes - i - 1, remaining - larger);
    }
    remaining -= v;
  }
  return m_sector_start[total] + rank;
}

SparseOperator::SparseOperator(Matrix matrix, bool symmetric)
    : m_matrix(std::move(matrix)), m_symmetric(symmetric) {
  m_matrix.makeCompressed();
}

double SparseOperator::asymmetry() const {
  const Matrix transposed = m_matrix.transpose();
  const Matrix diff = m_matrix - transposed;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (Matrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SparseOperator build_hamiltonian(const Eigen::VectorXd& particle_energies,
                                 const quad::ModeSet& modes, const FockBasis& fock) {
  const auto np = static_cast<std::size_t>(particle_energies.size());
  if (np == 0) throw PreconditionError("empty particle basis");
  if (fock.modes() != modes.size()) {
    std::ostringstream msg;
    msg << "Fock basis has " << fock.modes() << " modes, mode set has " << modes.size();
    throw PreconditionError(msg.str());
  }
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto& b = modes.modes[j].coupling;
    if (static_cast<std::size_t>(b.rows()) != np || static_cast<std::size_t>(b.cols()) != np) {
      std::ostringstream msg;
      msg << "coupling matrix of mode " << j << " is " << b.rows() << "x" << b.cols()
          << ", particle basis has " << np << " levels";
      throw PreconditionError(msg.str());
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw PreconditionError("coupling matrix of mode " + std::to_string(j) +
                              " is not symmetric");
    }
  }

  std::vector<bool> coupled(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    coupled[j] = modes.modes[j].coupling.cwiseAbs().maxCoeff() > 0.0;
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  const std::size_t dim = fock.size() * np;
  entries.reserve(dim * (1 + modes.size() * np));
  for (std::size_t f = 0; f < fock.size(); ++f) {
    const auto occ = fock.occupation(f);
    double field = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) field += occ[j] * modes.modes[j].omega;
    for (std::size_t a = 0; a < np; ++a) {
      const auto row = static_cast<Eigen::Index>(f * np + a);
      entries.emplace_back(row, row, particle_energies(static_cast<Eigen::Index>(a)) + field);
    }
    if (fock.degree(f) >= fock.n_max()) continue;
    for (std::size_t j = 0; j < modes.size(); ++j) {
      if (!coupled[j]) continue;
      const std::size_t g = fock.raise(f, j);
      const double ladder = std::sqrt(static_cast<double>(occ[j]) + 1.0);
      const auto& b = modes.modes[j].coupling;
      for (std::size_t a = 0; a < np; ++a) {
        for (std::size_t c = 0; c < np; ++c) {
          const double v = ladder * b(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
          if (v == 0.0) continue;
          const auto up = static_cast<Eigen::Index>(g * np + a);
          const auto down = static_cast<Eigen::Index>(f * np + c);
          entries.emplace_back(up, down, v);
          entries.emplace_back(down, up, v);
        }
      }
    }
  }
  SparseOperator::Matrix h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(entries.begin(), entries.end());
  return SparseOperator(std::move(h), true);
}

SparseOperator build_hamiltonian(const model::ParticleBasis& basis, const quad::ModeSet& modes,
                                 const FockBasis& fock) {
  return build_hamiltonian(basis.energies(), modes, fock);
}

namespace {

SparseOperator diagonal(const Eigen::VectorXd& values) {
  SparseOperator::Matrix m(values.size(), values.size());
  m.reserve(Eigen::VectorXi::Ones(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) m.insert(i, i) = values(i);
  return SparseOperator(std::move(m), true);
}

}  // namespace

SparseOperator number_operator(const FockBasis& fock, std::size_t particle_dim) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(fock.size() * particle_dim));
  for (std::size_t f = 0; f < fock.size(); ++f) {
    d.segment(static_cast<Eigen::Index>(f * particle_dim), static_cast<Eigen::Index>(particle_dim))
        .setConstant(fock.degree(f));
  }
  return diagonal(d);
}

SparseOperator field_energy(const quad::ModeSet& modes, const FockBasis& fock,
                            std::size_t particle_dim) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(fock.size() * particle_dim));
  for (std::size_t f = 0; f < fock.size(); ++f) {
    const auto occ = fock.occupation(f);
    double e = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) e += occ[j] * modes.modes[j].omega;
    d.segment(static_cast<Eigen::Index>(f * particle_dim), static_cast<Eigen::Index>(particle_dim))
        .setConstant(e);
  }
  return diagonal(d);
}

Eigen::VectorXd apply_annihilation(const FockBasis& fock, std::size_t particle_dim,
                                   std::size_t mode, const Eigen::VectorXd& psi) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(psi.size());
  const auto np = static_cast<Eigen::Index>(particle_dim);
  for (std::size_t f = 0; f < fock.size(); ++f) {
    if (fock.degree(f) >= fock.n_max()) continue;
    const std::size_t g = fock.raise(f, mode);
    const double ladder = std::sqrt(static_cast<double>(fock.occupation(f)[mode]) + 1.0);
    // a |g> = sqrt(nu_j(g)) |f>
    out.segment(static_cast<Eigen::Index>(f) * np, np) =
        ladder * psi.segment(static_cast<Eigen::Index>(g) * np, np);
  }
  return out;
}

Eigen::VectorXd apply_particle(const Eigen::MatrixXd& op, std::size_t fock_dim,
                               const Eigen::VectorXd& psi) {
  const Eigen::Index np = op.rows();
  Eigen::Map<const Eigen::MatrixXd> in(psi.data(), np, static_cast<Eigen::Index>(fock_dim));
  Eigen::VectorXd out(psi.size());
  Eigen::Map<Eigen::MatrixXd>(out.data(), np, static_cast<Eigen::Index>(fock_dim)) = op * in;
  return out;
}

GroundState ground_state(const SparseOperator& h, const EigenOptions& options) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  if (n == 0) throw PreconditionError("empty operator");
  GroundState gs;
  if (n == 1) {
    gs.energy = h.matrix().coeff(0, 0);
    gs.vector = Eigen::VectorXd::Ones(1);
    return gs;
  }
  const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(options.krylov), n);
  const Eigen::Index keep = std::max<Eigen::Index>(1, m / 2);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = uniform(rng);
  start.normalize();

  Eigen::MatrixXd v(n, m), w(n, m);
  Eigen::Index cols = 0;
  const auto append = [&](Eigen::VectorXd q) {
    // Two passes of classical Gram-Schmidt against the current basis.
    for (int pass = 0; pass < 2 && cols > 0; ++pass) {
      q -= v.leftCols(cols) * (v.leftCols(cols).transpose() * q);
    }
    const double norm = q.norm();
    if (!(norm > 1e-13)) return false;
    v.col(cols) = q / norm;
    w.col(cols) = h.matrix() * v.col(cols);
    ++gs.matvecs;
    ++cols;
    return true;
  };
  append(start);

  for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
    while (cols < m) {
      if (!append(w.col(cols - 1))) break;  // invariant subspace
    }
    Eigen::MatrixXd t = v.leftCols(cols).transpose() * w.leftCols(cols);
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd s0 = es.eigenvectors().col(0);
    const double theta = es.eigenvalues()(0);
    Eigen::VectorXd y = v.leftCols(cols) * s0;
    Eigen::VectorXd hy = w.leftCols(cols) * s0;
    const double ny = y.norm();
    y /= ny;
    hy /= ny;
    Eigen::VectorXd r = hy - theta * y;
    gs.energy = theta;
    gs.residual = r.norm();
    if (gs.residual <= options.tol * std::max(1.0, std::abs(theta))) {
      gs.vector = std::move(y);
      // Fix the overall sign: largest component positive.
      Eigen::Index imax = 0;
      gs.vector.cwiseAbs().maxCoeff(&imax);
      if (gs.vector(imax) < 0.0) gs.vector = -gs.vector;
      return gs;
    }
    // Thick restart: keep the lowest Ritz vectors, extend by the residual.
    const Eigen::Index l = std::min(keep, cols - 1);
    const Eigen::MatrixXd s = es.eigenvectors().leftCols(l);
    const Eigen::MatrixXd vk = v.leftCols(cols) * s;
    const Eigen::MatrixXd wk = w.leftCols(cols) * s;
    v.leftCols(l) = vk;
    w.leftCols(l) = wk;
    cols = l;
    if (!append(r)) {
      // Residual lies in the kept span (roundoff floor); restart from y alone.
      cols = 0;
      append(y);
    }
  }
  std::ostringstream msg;
  msg << "Lanczos did not converge: residual " << gs.residual << " after " << gs.matvecs
      << " products";
  throw NumericalError(msg.str());
}

double top_sector_weight(const FockBasis& fock, std::size_t particle_dim,
                         const Eigen::VectorXd& psi) {
  double weight = 0.0;
  const auto np = static_cast<Eigen::Index>(particle_dim);
  for (std::size_t f = 0; f < fock.size(); ++f) {
    if (fock.degree(f) == fock.n_max()) {
      weight += psi.segment(static_cast<Eigen::Index>(f) * np, np).squaredNorm();
    }
  }
  return weight;
}

GroundState solve(const Eigen::VectorXd& particle_energies, const quad::ModeSet& modes,
                  const FockBasis& fock, const EigenOptions& options) {
  const SparseOperator h = build_hamiltonian(particle_energies, modes, fock);
  GroundState gs = ground_state(h, options);
  gs.top_sector_weight =
      top_sector_weight(fock, static_cast<std::size_t>(particle_energies.size()), gs.vector);
  return gs;
}

Observables observables(const GroundState& gs, const FockBasis& fock, std::size_t particle_dim) {
  Observables out;
  out.occupations.assign(fock.modes(), 0.0);
  const auto np = static_cast<Eigen::Index>(particle_dim);
  out.particle_density_matrix = Eigen::MatrixXd::Zero(np, np);
  for (std::size_t f = 0; f < fock.size(); ++f) {
    const auto block = gs.vector.segment(static_cast<Eigen::Index>(f) * np, np);
    const double w = block.squaredNorm();
    const auto occ = fock.occupation(f);
    for (std::size_t j = 0; j < fock.modes(); ++j) out.occupations[j] += occ[j] * w;
    out.particle_density_matrix.noalias() += block * block.transpose();
  }
  out.n_expect = std::accumulate(out.occupations.begin(), out.occupations.end(), 0.0);
  return out;
}

Observables observables(const GroundState& gs, const FockBasis& fock,
                        const model::ParticleBasis& basis, double alpha) {
  Observables out = observables(gs, fock, basis.size());
  const Eigen::MatrixXd& phi = basis.vectors();
  const Eigen::MatrixXd weighted = phi * out.particle_density_matrix;
  out.position_density = (weighted.array() * phi.array()).rowwise().sum().max(0.0);
  double moment = 0.0;
  for (Eigen::Index i = 0; i < out.position_density.size(); ++i) {
    moment += basis.spacing() * out.position_density(i) *
              std::exp(2.0 * alpha * std::abs(basis.x(static_cast<std::size_t>(i))));
  }
  out.exp_moment = moment;
  return out;
}

double pullthrough_residual(const GroundState& gs, const SparseOperator& h, const FockBasis& fock,
                            const quad::ModeSet& modes, std::size_t mode, double cg_tol) {
  if (mode >= modes.size()) throw PreconditionError("mode index out of range");
  const auto& b = modes.modes[mode].coupling;
  const auto np = static_cast<std::size_t>(b.rows());
  const Eigen::VectorXd lhs = apply_annihilation(fock, np, mode, gs.vector);
  const Eigen::VectorXd source = apply_particle(b, fock.size(), gs.vector);
  if (source.norm() == 0.0) return lhs.norm();

  const double shift = modes.modes[mode].omega - gs.energy;
  SparseOperator::Matrix shifted = h.matrix();
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += shift;
  Eigen::ConjugateGradient<SparseOperator::Matrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(cg_tol);
  cg.setMaxIterations(static_cast<Eigen::Index>(std::max<std::size_t>(1000, 10 * h.dimension())));
  cg.compute(shifted);
  const Eigen::VectorXd x = cg.solve(source);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "pullthrough solve failed after " << cg.iterations() << " iterations, error "
        << cg.error();
    throw NumericalError(msg.str());
  }
  return (lhs + x).norm();
}

NtauSample ntau_sample(const FockBasis& fock, const quad::ModeSet& modes,
                       const Eigen::VectorXd& psi) {
  if (modes.empty()) return {};
  const auto np = static_cast<std::size_t>(modes.modes.front().coupling.rows());
  Eigen::VectorXd field = Eigen::VectorXd::Zero(psi.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np),
                                               static_cast<Eigen::Index>(np));
  double scalar = 0.0;
  double hf = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto& b = modes.modes[j].coupling;
    const double omega = modes.modes[j].omega;
    const Eigen::VectorXd lowered = apply_annihilation(fock, np, j, psi);
    field += apply_particle(b.transpose(), fock.size(), lowered);
    hf += omega * lowered.squaredNorm();
    gram.noalias() += b * b.transpose() / omega;
    const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues()(0);
    scalar += norm * norm / omega;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  NtauSample s;
  s.lhs = field.squaredNorm();
  s.rhs = es.eigenvalues().maxCoeff() * hf;
  s.rhs_scalar = scalar * hf;
  return s;
}

NtauReport check_ntau(const FockBasis& fock, const quad::ModeSet& modes,
                      std::span<const Eigen::VectorXd> trials, double slack) {
  NtauReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& psi : trials) {
    const NtauSample s = ntau_sample(fock, modes, psi);
    if (s.margin() < -slack) ++report.violations;
    report.worst_margin = std::min(report.worst_margin, s.margin());
    report.samples.push_back(s);
  }
  if (trials.empty()) report.worst_margin = 0.0;
  return report;
}

std::vector<Eigen::VectorXd> random_trials(const FockBasis& fock, std::size_t particle_dim,
                                           std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> out;
  const auto np = static_cast<Eigen::Index>(particle_dim);
  for (std::size_t t = 0; t < count; ++t) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fock.size()) * np);
    for (std::size_t f = 0; f < fock.size(); ++f) {
      if (fock.n_max() > 0 && fock.degree(f) >= fock.n_max()) continue;
      for (Eigen::Index a = 0; a < np; ++a) psi(static_cast<Eigen::Index>(f) * np + a) = normal(rng);
    }
    psi.normalize();
    out.push_back(std::move(psi));
  }
  return out;
}

VanHove vanhove_reference(const quad::ModeSet& modes, double particle_ground_energy) {
  VanHove out;
  out.energy = particle_ground_energy;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto& b = modes.modes[j].coupling;
    const double g = b.size() > 0 ? b(0, 0) : 0.0;
    const Eigen::MatrixXd expected =
        g * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    const double scale = std::max(1e-300, std::abs(g));
    if ((b - expected).cwiseAbs().maxCoeff() > 1e-14 * scale) {
      throw PreconditionError("mode " + std::to_string(j) +
                              " coupling is not a multiple of the identity");
    }
    const double omega = modes.modes[j].omega;
    out.energy -= g * g / omega;
    out.occupations.push_back((g / omega) * (g / omega));
  }
  return out;
}

}  // namespace frictionlab::fock
