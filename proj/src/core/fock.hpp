#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/model.hpp"
#include "core/quadrature.hpp"

namespace frictionlab::fock {

// Occupation-number states of M modes with total occupation <= N_max.
// Index 0 is the vacuum. States are grouped by total occupation; inside a
// sector they are in decreasing lexicographic order, so e_0 comes before e_1.
class FockBasis {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  FockBasis(std::size_t modes, unsigned n_max);

  std::size_t size() const { return m_degree.size(); }
  std::size_t modes() const { return m_modes; }
  unsigned n_max() const { return m_n_max; }

  std::span<const std::uint8_t> occupation(std::size_t index) const {
    return {m_occupations.data() + index * m_modes, m_modes};
  }
  unsigned degree(std::size_t index) const { return m_degree[index]; }

  // State with one more boson in `mode`, or npos at the cap.
  std::size_t raise(std::size_t index, std::size_t mode) const {
    return m_raise[index * m_modes + mode];
  }

  std::optional<std::size_t> index_of(std::span<const std::uint8_t> occupation) const;

  // C(M + N_max, N_max).
  static std::size_t dimension(std::size_t modes, unsigned n_max);

 private:
  std::size_t m_modes;
  unsigned m_n_max;
  std::vector<std::uint8_t> m_occupations;
  std::vector<std::uint8_t> m_degree;
  std::vector<std::size_t> m_raise;
  std::vector<std::size_t> m_sector_start;
};

// Real sparse matrix acting on particle (x) Fock vectors. The combined index
// of particle level a and Fock state f is f * N_p + a.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseOperator() = default;
  SparseOperator(Matrix matrix, bool symmetric);

  std::size_t dimension() const { return static_cast<std::size_t>(m_matrix.rows()); }
  bool symmetric() const { return m_symmetric; }
  const Matrix& matrix() const { return m_matrix; }
  std::size_t nonzeros() const { return static_cast<std::size_t>(m_matrix.nonZeros()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_matrix * x; }
  double expectation(const Eigen::VectorXd& x) const { return x.dot(m_matrix * x); }

  // max |A - A^T| over stored entries.
  double asymmetry() const;

 private:
  Matrix m_matrix;
  bool m_symmetric = false;
};

// H = H_p (x) 1 + 1 (x) sum_j omega_j a*_j a_j + sum_j (B_j (x) a*_j + B_j^T (x) a_j).
SparseOperator build_hamiltonian(const Eigen::VectorXd& particle_energies,
                                 const quad::ModeSet& modes, const FockBasis& fock);
SparseOperator build_hamiltonian(const model::ParticleBasis& basis, const quad::ModeSet& modes,
                                 const FockBasis& fock);

// Diagonal operators.
SparseOperator number_operator(const FockBasis& fock, std::size_t particle_dim);
SparseOperator field_energy(const quad::ModeSet& modes, const FockBasis& fock,
                            std::size_t particle_dim);

// a_j psi and (B (x) 1) psi.
Eigen::VectorXd apply_annihilation(const FockBasis& fock, std::size_t particle_dim,
                                   std::size_t mode, const Eigen::VectorXd& psi);
Eigen::VectorXd apply_particle(const Eigen::MatrixXd& op, std::size_t fock_dim,
                               const Eigen::VectorXd& psi);

struct EigenOptions {
  double tol = 1e-10;          // residual, scaled by max(1, |E|)
  std::size_t krylov = 60;     // Lanczos vectors per restart
  std::size_t max_restarts = 200;
  std::uint64_t seed = 20240611;
};

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  double top_sector_weight = 0.0;  // mass on total occupation N_max
  std::size_t matvecs = 0;
};

// Lowest eigenpair by restarted Lanczos with full reorthogonalization from a
// seeded random start. Throws NumericalError when the residual target is not
// met within max_restarts.
GroundState ground_state(const SparseOperator& h, const EigenOptions& options = {});

// Fills top_sector_weight.
double top_sector_weight(const FockBasis& fock, std::size_t particle_dim,
                         const Eigen::VectorXd& psi);

// Convenience: build, solve and fill the truncation diagnostic.
GroundState solve(const Eigen::VectorXd& particle_energies, const quad::ModeSet& modes,
                  const FockBasis& fock, const EigenOptions& options = {});

struct Observables {
  double n_expect = 0.0;
  std::vector<double> occupations;      // <a*_j a_j>
  Eigen::MatrixXd particle_density_matrix;
  Eigen::VectorXd position_density;     // on the basis grid, sum h * density = 1
  double exp_moment = 0.0;              // <exp(2 alpha |Q|)>
};

Observables observables(const GroundState& gs, const FockBasis& fock,
                        const model::ParticleBasis& basis, double alpha = 0.0);
// Same without a spatial basis (no density or moment).
Observables observables(const GroundState& gs, const FockBasis& fock, std::size_t particle_dim);

// || a_j psi + (H + omega_j - E_0)^{-1} (B_j (x) 1) psi ||, solved by CG.
double pullthrough_residual(const GroundState& gs, const SparseOperator& h, const FockBasis& fock,
                            const quad::ModeSet& modes, std::size_t mode, double cg_tol = 1e-10);

struct NtauSample {
  double lhs = 0.0;          // || sum_j (B_j^T (x) a_j) psi ||^2
  double rhs = 0.0;          // lambda_max(sum_j B_j B_j^T / omega_j) <psi, H_f psi>
  double rhs_scalar = 0.0;   // (sum_j ||B_j||^2 / omega_j) <psi, H_f psi>
  double margin() const { return rhs - lhs; }
};

struct NtauReport {
  std::vector<NtauSample> samples;
  std::size_t violations = 0;  // margin < -slack
  double worst_margin = 0.0;
};

NtauSample ntau_sample(const FockBasis& fock, const quad::ModeSet& modes,
                       const Eigen::VectorXd& psi);
NtauReport check_ntau(const FockBasis& fock, const quad::ModeSet& modes,
                      std::span<const Eigen::VectorXd> trials, double slack = 1e-12);
// Normalized Gaussian vectors supported on total occupation < N_max.
std::vector<Eigen::VectorXd> random_trials(const FockBasis& fock, std::size_t particle_dim,
                                           std::size_t count, std::uint64_t seed);

struct VanHove {
  double energy = 0.0;
  std::vector<double> occupations;
};

// Closed form for couplings B_j = g_j * Identity. Throws PreconditionError
// if some coupling is not a multiple of the identity.
VanHove vanhove_reference(const quad::ModeSet& modes, double particle_ground_energy);

}  // namespace frictionlab::fock
