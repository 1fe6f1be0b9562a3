#include "superrad/oracle.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace superrad::oracle {

namespace {

constexpr complex I{0.0, 1.0};
using Triplet = Eigen::Triplet<complex>;

SparseMatrix identity(std::size_t n) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setIdentity();
    return m;
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& t) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix annihilation(int cutoff) {
    std::vector<Triplet> t;
    for (int n = 1; n <= cutoff; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    return from_triplets(static_cast<std::size_t>(cutoff) + 1, t);
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out = Eigen::kroneckerProduct(a, b);
    out.makeCompressed();
    return out;
}

BasisInfo make_basis(Basis basis, int n_atoms, int cutoff) {
    if (n_atoms < 1) throw std::invalid_argument("oracle needs n_atoms >= 1");
    if (cutoff < 1) throw std::invalid_argument("oracle needs photon cutoff >= 1");
    BasisInfo b;
    b.basis = basis;
    b.n_atoms = n_atoms;
    b.cutoff = cutoff;
    if (basis == Basis::product && n_atoms > 20) throw OracleError("dimension overflow: 2^N product basis too large");
    b.atom_dim = basis == Basis::dicke_ladder ? static_cast<std::size_t>(n_atoms) + 1 : std::size_t{1} << n_atoms;
    b.dim = b.atom_dim * (static_cast<std::size_t>(cutoff) + 1);
    if (b.dim > max_dimension)
        throw OracleError("dimension overflow: Hilbert space dimension " + std::to_string(b.dim) + " exceeds " +
                          std::to_string(max_dimension));
    return b;
}

// -i[H, .] + sum_k D[L_k] on column-major vec(rho).
SparseMatrix superoperator(const SparseMatrix& h, const std::vector<SparseMatrix>& jumps, std::size_t dim) {
    const SparseMatrix id = identity(dim);
    const SparseMatrix ht = h.transpose();
    SparseMatrix l = (-I) * (kron(id, h) - kron(ht, id));
    for (const SparseMatrix& a : jumps) {
        const SparseMatrix ad = a.adjoint();
        const SparseMatrix ada = ad * a;
        const SparseMatrix adat = ada.transpose();
        const SparseMatrix ac = a.conjugate();
        l += kron(ac, a) - 0.5 * kron(id, ada) - 0.5 * kron(adat, id);
    }
    l.prune(complex(0.0, 0.0));
    l.makeCompressed();
    return l;
}

Liouvillian assemble(const SystemParams& params, const BasisInfo& basis, const SparseMatrix& sz_atom,
                     const SparseMatrix& splus_atom, const std::vector<SparseMatrix>& atom_jumps) {
    const std::size_t fock = static_cast<std::size_t>(basis.cutoff) + 1;
    const SparseMatrix id_a = identity(basis.atom_dim);
    const SparseMatrix id_c = identity(fock);
    const SparseMatrix c = annihilation(basis.cutoff);
    const SparseMatrix cd = c.adjoint();
    const SparseMatrix nc = cd * c;
    const SparseMatrix sminus_atom = splus_atom.adjoint();

    Liouvillian l;
    l.basis = basis;
    l.hamiltonian = params.omega_a * kron(sz_atom, id_c) + params.omega_c * kron(id_a, nc) +
                    params.g * (kron(splus_atom, c) + kron(sminus_atom, cd));
    for (const SparseMatrix& j : atom_jumps) l.jumps.push_back(kron(j, id_c));
    if (params.kappa > 0.0) l.jumps.push_back(std::sqrt(2.0 * params.kappa) * kron(id_a, c));
    l.super = superoperator(l.hamiltonian, l.jumps, basis.dim);

    l.sz_diag.resize(static_cast<Eigen::Index>(basis.dim));
    l.photon_diag.resize(static_cast<Eigen::Index>(basis.dim));
    for (std::size_t a = 0; a < basis.atom_dim; ++a) {
        const double sz = sz_atom.coeff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
        for (std::size_t n = 0; n < fock; ++n) {
            const auto idx = static_cast<Eigen::Index>(a * fock + n);
            l.sz_diag[idx] = sz;
            l.photon_diag[idx] = static_cast<double>(n);
        }
    }
    return l;
}

struct Recorder {
    const Liouvillian& l;
    double saturation_limit;
    double trace_tolerance;

    void check(const Matrix& rho, double t) const {
        const double tr = rho.trace().real();
        if (std::abs(tr - 1.0) > trace_tolerance)
            throw OracleError("tolerance failure: trace drifted to " + std::to_string(tr) + " at t=" + std::to_string(t));
        const std::size_t fock = static_cast<std::size_t>(l.basis.cutoff) + 1;
        double top = 0.0;
        for (std::size_t a = 0; a < l.basis.atom_dim; ++a) {
            const auto idx = static_cast<Eigen::Index>(a * fock + fock - 1);
            top += rho(idx, idx).real();
        }
        if (top > saturation_limit)
            throw OracleError("cutoff saturation: top Fock level population " + std::to_string(top) +
                              " exceeds limit; increase the photon cutoff");
    }
};

Method pick(const Liouvillian& l, Method m) {
    if (m != Method::automatic) return m;
    return l.dim() <= 20 ? Method::propagator : Method::adaptive;
}

void check_grid(std::span<const double> t) {
    if (t.empty()) throw std::invalid_argument("evolve: empty time grid");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("evolve: time grid must be strictly increasing");
}

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = std::abs(err[i]) / sc;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

// Dormand-Prince 5(4) on the vectorized master equation.
class AdaptiveStepper {
  public:
    AdaptiveStepper(const SparseMatrix& super, double rtol, double atol) : l_(super), rtol_(rtol), atol_(atol) {}

    void advance(Vector& y, double t0, double t1) {
        double t = t0;
        if (h_ <= 0.0) h_ = std::min(1e-3, t1 - t0);
        while (t < t1) {
            bool last = false;
            double h = h_;
            if (t + h >= t1) {
                h = t1 - t;
                last = true;
            }
            const Vector k1 = l_ * y;
            const Vector k2 = l_ * (y + h * (a21 * k1));
            const Vector k3 = l_ * (y + h * (a31 * k1 + a32 * k2));
            const Vector k4 = l_ * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vector k5 = l_ * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vector k6 = l_ * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vector k7 = l_ * y5;
            const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = error_norm(err, y, y5, rtol_, atol_);
            if (!std::isfinite(en)) throw OracleError("tolerance failure: non-finite error estimate");
            if (en <= 1.0) {
                t = last ? t1 : t + h;
                y = y5;
            }
            const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (!(last && en <= 1.0)) h_ = h * factor;
            if (h_ < 1e-14 * std::max(1.0, std::abs(t1)))
                throw OracleError("tolerance failure: step size underflow at t=" + std::to_string(t));
        }
    }

  private:
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const SparseMatrix& l_;
    double rtol_;
    double atol_;
    double h_ = 0.0;
};

}  // namespace

Liouvillian build_liouvillian_collective(const SystemParams& params, int n_atoms, int cutoff) {
    const BasisInfo basis = make_basis(Basis::dicke_ladder, n_atoms, cutoff);
    const std::size_t d = basis.atom_dim;
    std::vector<Triplet> sz, sp;
    for (std::size_t k = 0; k < d; ++k) {
        // k excitations, m = k - N/2
        sz.emplace_back(k, k, static_cast<double>(k) - 0.5 * n_atoms);
        if (k + 1 < d) sp.emplace_back(k + 1, k, std::sqrt(static_cast<double>((n_atoms - k) * (k + 1))));
    }
    const SparseMatrix sz_atom = from_triplets(d, sz);
    const SparseMatrix splus_atom = from_triplets(d, sp);
    std::vector<SparseMatrix> jumps;
    const double gam = params.decay_rate();
    if (gam > 0.0) jumps.push_back(std::sqrt(2.0 * gam) * SparseMatrix(splus_atom.adjoint()));
    return assemble(params, basis, sz_atom, splus_atom, jumps);
}

Liouvillian build_liouvillian_individual(const SystemParams& params, int n_atoms, int cutoff) {
    const BasisInfo basis = make_basis(Basis::product, n_atoms, cutoff);
    const std::size_t d = basis.atom_dim;
    std::vector<Triplet> sz, sp;
    std::vector<std::vector<Triplet>> lowering(static_cast<std::size_t>(n_atoms));
    for (std::size_t s = 0; s < d; ++s) {
        double z = 0.0;
        for (int i = 0; i < n_atoms; ++i) {
            const std::size_t bit = std::size_t{1} << i;
            if (s & bit) {
                z += 0.5;
                lowering[static_cast<std::size_t>(i)].emplace_back(s & ~bit, s, 1.0);
            } else {
                z -= 0.5;
                sp.emplace_back(s | bit, s, 1.0);
            }
        }
        sz.emplace_back(s, s, z);
    }
    const SparseMatrix sz_atom = from_triplets(d, sz);
    const SparseMatrix splus_atom = from_triplets(d, sp);
    std::vector<SparseMatrix> jumps;
    const double gam = params.decay_rate();
    if (gam > 0.0)
        for (const auto& t : lowering) jumps.push_back(std::sqrt(2.0 * gam) * from_triplets(d, t));
    return assemble(params, basis, sz_atom, splus_atom, jumps);
}

DensityMatrix excited_vacuum(const BasisInfo& basis) {
    DensityMatrix dm{Matrix::Zero(static_cast<Eigen::Index>(basis.dim), static_cast<Eigen::Index>(basis.dim)), basis};
    const std::size_t fock = static_cast<std::size_t>(basis.cutoff) + 1;
    // Fully excited atom state is the last atom index in both bases.
    const auto idx = static_cast<Eigen::Index>((basis.atom_dim - 1) * fock);
    dm.rho(idx, idx) = 1.0;
    return dm;
}

Matrix apply(const Liouvillian& l, const Matrix& rho) {
    const auto n = static_cast<Eigen::Index>(l.dim());
    const Vector v = Eigen::Map<const Vector>(rho.data(), n * n);
    const Vector out = l.super * v;
    return Eigen::Map<const Matrix>(out.data(), n, n);
}

std::vector<Matrix> evolve_states(const Liouvillian& l, const DensityMatrix& rho0, std::span<const double> t_grid,
                                  const EvolveOptions& opts) {
    check_grid(t_grid);
    const auto n = static_cast<Eigen::Index>(l.dim());
    if (rho0.rho.rows() != n || rho0.rho.cols() != n) throw std::invalid_argument("evolve: rho0 dimension mismatch");
    const Recorder rec{l, opts.saturation_limit, opts.trace_tolerance};
    std::vector<Matrix> out;
    out.reserve(t_grid.size());
    Vector y = Eigen::Map<const Vector>(rho0.rho.data(), n * n);
    auto emit = [&](double t) {
        Matrix rho = Eigen::Map<const Matrix>(y.data(), n, n);
        rec.check(rho, t);
        out.push_back(std::move(rho));
    };
    emit(t_grid[0]);

    if (pick(l, opts.method) == Method::propagator) {
        const Matrix dense = Matrix(l.super);
        double cached_dt = -1.0;
        Matrix prop;
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            const double dt = t_grid[i] - t_grid[i - 1];
            // Grid spacings k * dt differ by rounding; reuse the propagator for those.
            if (std::abs(dt - cached_dt) > 1e-12 * dt) {
                prop = (dense * dt).exp();
                cached_dt = dt;
            }
            y = prop * y;
            emit(t_grid[i]);
        }
    } else {
        AdaptiveStepper stepper(l.super, opts.rtol, opts.atol);
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            stepper.advance(y, t_grid[i - 1], t_grid[i]);
            emit(t_grid[i]);
        }
    }
    return out;
}

ObservableSeries evolve_density_matrix(const Liouvillian& l, const DensityMatrix& rho0, std::span<const double> t_grid,
                                       const EvolveOptions& opts) {
    const std::vector<Matrix> states = evolve_states(l, rho0, t_grid, opts);
    ObservableSeries s;
    s.n_atoms = l.basis.n_atoms;
    s.resize(t_grid.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto diag = states[i].diagonal().real();
        s.times[i] = t_grid[i];
        s.sz_mean[i] = diag.dot(l.sz_diag);
        s.photon_mean[i] = diag.dot(l.photon_diag);
    }
    return s;
}

ObservableSeries simulate(const Config& config, const EvolveOptions& opts) {
    const SystemParams& p = config.system();
    const NumericalParams& num = config.numerics();
    const int cutoff = num.photon_cutoff < 0 ? p.n_atoms + 1 : num.photon_cutoff;
    if (cutoff < p.n_atoms + 1)
        throw ValidationError({"photon_cutoff must be >= n_atoms + 1 for oracle runs"});
    const Liouvillian l = p.scheme() == Scheme::collective ? build_liouvillian_collective(p, p.n_atoms, cutoff)
                                                           : build_liouvillian_individual(p, p.n_atoms, cutoff);
    std::vector<double> grid(static_cast<std::size_t>(num.n_steps()) + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) * num.dt;
    return evolve_density_matrix(l, excited_vacuum(l.basis), grid, opts);
}

}  // namespace superrad::oracle
