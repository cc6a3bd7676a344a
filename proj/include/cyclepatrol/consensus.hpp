#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "cyclepatrol/errors.hpp"

namespace cyclepatrol {

// Matrices of the traversing-time update for every link (i, i+1),
// i = 0..n-2. The seam link (n-1, 0) never updates and has no matrix.
struct ConsensusMatrices {
    std::size_t n = 0;
    Eigen::VectorXd speeds;
    Eigen::MatrixXd V;
    std::vector<double> eps;
    std::vector<Eigen::MatrixXd> P;
    std::vector<Eigen::MatrixXd> Ptilde;
    std::vector<Eigen::MatrixXd> L;
    std::vector<Eigen::MatrixXd> Ltilde;

    std::size_t links() const { return P.size(); }
};

inline ConsensusMatrices build_matrices(const std::vector<double>& speeds) {
    const std::size_t n = speeds.size();
    if (n < 2) throw ValidationError("input", "need at least two speeds");
    for (double v : speeds)
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("input", "speeds must be positive");
    ConsensusMatrices m;
    m.n = n;
    m.speeds = Eigen::Map<const Eigen::VectorXd>(speeds.data(), static_cast<Eigen::Index>(n));
    m.V = m.speeds.asDiagonal();
    const Eigen::VectorXd sqrt_v = m.speeds.cwiseSqrt();
    const Eigen::MatrixXd Vh = sqrt_v.asDiagonal();
    const Eigen::MatrixXd Vih = sqrt_v.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd Vi = m.speeds.cwiseInverse().asDiagonal();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double vi = speeds[i], vj = speeds[i + 1];
        const double eps = vi * vj / (vi + vj);
        Eigen::MatrixXd Li = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(i + 1);
        Li(a, a) = 1.0;
        Li(b, b) = 1.0;
        Li(a, b) = -1.0;
        Li(b, a) = -1.0;
        Eigen::MatrixXd Pi = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) -
                             eps * Vi * Li;
        m.eps.push_back(eps);
        m.L.push_back(Li);
        m.Ltilde.push_back(Vih * Li * Vih);
        m.Ptilde.push_back(Vh * Pi * Vih);
        m.P.push_back(std::move(Pi));
    }
    return m;
}

struct LinkSpectrum {
    std::size_t link = 0;
    std::vector<double> eigenvalues;  // ascending
    double symmetry_error = 0.0;      // max |Ptilde - Ptilde^T|
    bool ok = true;
};

struct SpectrumReport {
    std::vector<LinkSpectrum> links;
    double product_spectral_radius = 0.0;
    double product_spectral_norm = 0.0;  // of the similar symmetric-basis product
    bool primitive = false;
    bool ok = true;
    std::string diagnostic;
};

// Eigenvalues of every P_i (through the symmetric Ptilde_i) must lie in
// (-1, 1] within tol; the round-robin product must be primitive.
inline SpectrumReport check_spectrum(const ConsensusMatrices& m, double tol = 1e-9) {
    SpectrumReport rep;
    const auto n = static_cast<Eigen::Index>(m.n);
    for (std::size_t i = 0; i < m.links(); ++i) {
        LinkSpectrum ls;
        ls.link = i;
        const Eigen::MatrixXd& T = m.Ptilde[i];
        ls.symmetry_error = (T - T.transpose()).cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double lam = es.eigenvalues()(k);
            ls.eigenvalues.push_back(lam);
            if (!(lam > -1.0 && lam <= 1.0 + tol)) ls.ok = false;
        }
        if (ls.symmetry_error > tol) ls.ok = false;
        if (!ls.ok) {
            rep.ok = false;
            rep.diagnostic += "link " + std::to_string(i + 1) + " spectrum out of range; ";
        }
        rep.links.push_back(std::move(ls));
    }
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd prod_t = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < m.links(); ++i) {
        prod = m.P[i] * prod;
        prod_t = m.Ptilde[i] * prod_t;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> gs(prod, false);
    rep.product_spectral_radius = gs.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod_t);
    rep.product_spectral_norm = svd.singularValues()(0);
    if (rep.product_spectral_norm > 1.0 + tol) {
        rep.ok = false;
        rep.diagnostic += "product spectral norm above 1; ";
    }
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) power = prod * power;
    rep.primitive = (power.array() > 0.0).all();
    if (!rep.primitive) {
        rep.ok = false;
        rep.diagnostic += "link product is not primitive; ";
    }
    return rep;
}

// Weighted mean sum(v e0) / sum(v), the fixed point of every P_i.
inline Eigen::VectorXd consensus_fixed_point(const ConsensusMatrices& m, const Eigen::VectorXd& e0) {
    const double mean = m.speeds.dot(e0) / m.speeds.sum();
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.n), mean);
}

inline Eigen::VectorXd iterate_consensus(const ConsensusMatrices& m, Eigen::VectorXd e,
                                         const std::vector<std::size_t>& link_sequence) {
    for (auto i : link_sequence) {
        if (i >= m.links()) throw RangeError("link " + std::to_string(i) + " does not exist");
        e = m.P[i] * e;
    }
    return e;
}

struct ConsensusRun {
    Eigen::VectorXd e;
    std::size_t sweeps = 0;
    double error = 0.0;  // max |e - e*|
    bool converged = false;
};

// Round-robin sweeps over links 0..n-2 until within tol of the fixed point.
inline ConsensusRun iterate_round_robin(const ConsensusMatrices& m, const Eigen::VectorXd& e0, double tol = 1e-9,
                                        std::size_t max_sweeps = 10000) {
    ConsensusRun run;
    const Eigen::VectorXd target = consensus_fixed_point(m, e0);
    run.e = e0;
    run.error = (run.e - target).cwiseAbs().maxCoeff();
    while (run.error >= tol && run.sweeps < max_sweeps) {
        for (std::size_t i = 0; i < m.links(); ++i) run.e = m.P[i] * run.e;
        ++run.sweeps;
        run.error = (run.e - target).cwiseAbs().maxCoeff();
    }
    run.converged = run.error < tol;
    return run;
}

}  // namespace cyclepatrol
