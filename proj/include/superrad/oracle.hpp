#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <stdexcept>
#include <vector>

#include "superrad/model.hpp"

/**
 * Brute-force Lindblad integration for small systems. This is the reference
 * the phase-space solvers are validated against.
 */
namespace superrad::oracle {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<complex>;

enum class Basis {
    /// Maximal-spin Dicke ladder |J = N/2, m> tensored with Fock states.
    dicke_ladder,
    /// Full 2^N product basis tensored with Fock states.
    product,
};

struct BasisInfo {
    Basis basis = Basis::dicke_ladder;
    int n_atoms = 1;
    int cutoff = 2;           // highest Fock level kept
    std::size_t atom_dim = 2;
    std::size_t dim = 6;      // atom_dim * (cutoff + 1)
};

class OracleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DensityMatrix {
    Matrix rho;
    BasisInfo basis;
};

/// Superoperator acting on column-major vec(rho), plus the operators observables need.
struct Liouvillian {
    SparseMatrix super;
    BasisInfo basis;
    SparseMatrix hamiltonian;
    std::vector<SparseMatrix> jumps;  // already scaled by sqrt(rate)
    Eigen::VectorXd sz_diag;          // S_z is diagonal in both bases
    Eigen::VectorXd photon_diag;      // c^dag c likewise

    std::size_t dim() const { return basis.dim; }
};

/// Largest Hilbert-space dimension accepted by the builders.
inline constexpr std::size_t max_dimension = 1024;

Liouvillian build_liouvillian_collective(const SystemParams& params, int n_atoms, int cutoff);
Liouvillian build_liouvillian_individual(const SystemParams& params, int n_atoms, int cutoff);

/// All atoms excited, cavity in vacuum.
DensityMatrix excited_vacuum(const BasisInfo& basis);

/// L rho as a matrix.
Matrix apply(const Liouvillian& l, const Matrix& rho);

enum class Method {
    automatic,   // propagator for small dimensions, adaptive otherwise
    propagator,  // dense exp(L dt)
    adaptive,    // Dormand-Prince 5(4) with error control
};

struct EvolveOptions {
    Method method = Method::automatic;
    double rtol = 1e-10;
    double atol = 1e-12;
    double saturation_limit = 1e-6;
    double trace_tolerance = 1e-10;
};

/**
 * Evolves rho0 and reports <S_z> and <c^dag c> at each time in t_grid
 * (standard errors are zero). Throws OracleError if the trace drifts or the
 * top Fock level gets populated beyond saturation_limit.
 */
ObservableSeries evolve_density_matrix(const Liouvillian& l, const DensityMatrix& rho0, std::span<const double> t_grid,
                                       const EvolveOptions& opts = {});

/// Density matrix at each time in t_grid (same integrators as above).
std::vector<Matrix> evolve_states(const Liouvillian& l, const DensityMatrix& rho0, std::span<const double> t_grid,
                                  const EvolveOptions& opts = {});

/// Builds the scheme's Liouvillian from a validated config and evolves on its grid.
ObservableSeries simulate(const Config& config, const EvolveOptions& opts = {});

}  // namespace superrad::oracle
