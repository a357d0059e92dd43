#include <Eigen/QR>
#include <cmath>

#include "revoq/errors.hpp"
#include "revoq/harness.hpp"

namespace revoq {

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Haar-random pure state: normalized complex Gaussian vector.
Vector haar_vector(int64_t dim, SplitRng& rng) {
    auto gauss = [&rng]() {
        // Box-Muller from the library stream.
        double u1 = rng.next_double();
        while (u1 <= 1e-300) u1 = rng.next_double();
        const double u2 = rng.next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    Vector v(dim);
    for (int64_t i = 0; i < dim; ++i) v(i) = std::complex<double>(gauss(), gauss());
    v /= v.norm();
    return v;
}

/// Haar-random isometry rows x cols (rows >= cols): thin Q of a Gaussian.
Matrix haar_isometry(int64_t rows, int64_t cols, SplitRng& rng) {
    Matrix g(rows, cols);
    auto gauss = [&rng]() {
        double u1 = rng.next_double();
        while (u1 <= 1e-300) u1 = rng.next_double();
        const double u2 = rng.next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < cols; ++c) g(r, c) = std::complex<double>(gauss(), gauss());
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    return q;
}

/// Partial trace over the X factor of a (dx*dy)-dimensional operator.
Matrix trace_out_first(const Matrix& op, int64_t dx, int64_t dy) {
    Matrix out = Matrix::Zero(dy, dy);
    for (int64_t x = 0; x < dx; ++x) {
        out += op.block(x * dy, x * dy, dy, dy);
    }
    return out;
}

/// Partial trace over the E factor of a (dxp*de)-dimensional operator.
Matrix trace_out_second(const Matrix& op, int64_t dxp, int64_t de) {
    Matrix out = Matrix::Zero(dxp, dxp);
    for (int64_t a = 0; a < dxp; ++a) {
        for (int64_t b = 0; b < dxp; ++b) {
            std::complex<double> acc = 0.0;
            for (int64_t e = 0; e < de; ++e) acc += op(a * de + e, b * de + e);
            out(a, b) = acc;
        }
    }
    return out;
}

struct Workspace {
    int64_t dx, dy, dxp, de;
    Vector s_copies;                     // |S>^{(x)k} on X
    Vector s_single;                     // |S> on X'
    std::vector<uint64_t> subset;
    int width, copies;
    double factor;

    /// X basis indices whose register decomposition is a distinct tuple of
    /// subset elements avoiding `excluded`.
    bool tuple_ok(uint64_t x_index, uint64_t excluded) const {
        const uint64_t mask = (uint64_t{1} << width) - 1;
        std::vector<uint64_t> regs(copies);
        for (int r = copies - 1; r >= 0; --r) {
            regs[r] = x_index & mask;
            x_index >>= width;
        }
        for (int i = 0; i < copies; ++i) {
            if (regs[i] == excluded) return false;
            bool member = false;
            for (uint64_t v : subset) member = member || v == regs[i];
            if (!member) return false;
            for (int j = i + 1; j < copies; ++j) {
                if (regs[i] == regs[j]) return false;
            }
        }
        return true;
    }
};

DistinctExtractionCase evaluate(const Workspace& ws, const Matrix& rho, const Matrix& v_iso) {
    DistinctExtractionCase c;

    // M(s) = V^dag (|s><s| (x) I_E) V, assembled once per subset element.
    std::vector<Matrix> m_ops;
    m_ops.reserve(ws.subset.size());
    for (uint64_t s : ws.subset) {
        Matrix proj = Matrix::Zero(ws.dxp * ws.de, ws.dxp * ws.de);
        for (int64_t e = 0; e < ws.de; ++e) {
            const int64_t d = static_cast<int64_t>(s) * ws.de + e;
            proj(d, d) = 1.0;
        }
        m_ops.push_back(v_iso.adjoint() * proj * v_iso);
    }

    // lhs = Tr[Lambda rho] with Lambda = sum_s D_s (x) M(s), D_s the diagonal
    // indicator of distinct subset tuples avoiding s.
    double lhs = 0.0;
    for (size_t si = 0; si < ws.subset.size(); ++si) {
        for (int64_t x = 0; x < ws.dx; ++x) {
            if (!ws.tuple_ok(static_cast<uint64_t>(x), ws.subset[si])) continue;
            lhs += (m_ops[si] * rho.block(x * ws.dy, x * ws.dy, ws.dy, ws.dy)).trace().real();
        }
    }
    c.lhs = lhs;

    // Revocation probability Tr[(P (x) I) rho] for P = |S^k><S^k|.
    Matrix pxi = Matrix::Zero(ws.dx * ws.dy, ws.dx * ws.dy);
    {
        const Matrix p = ws.s_copies * ws.s_copies.adjoint();
        for (int64_t a = 0; a < ws.dx; ++a) {
            for (int64_t b = 0; b < ws.dx; ++b) {
                if (p(a, b) == std::complex<double>{0.0, 0.0}) continue;
                pxi.block(a * ws.dy, b * ws.dy, ws.dy, ws.dy) +=
                    p(a, b) * Matrix::Identity(ws.dy, ws.dy);
            }
        }
    }
    const double revoke_prob = (pxi * rho).trace().real();
    c.revoke_prob = revoke_prob;

    if (revoke_prob <= 1e-12) {
        c.rhs = 0.0;
        c.extract_prob = 0.0;
    } else {
        const Matrix sigma = trace_out_first(pxi * rho * pxi, ws.dx, ws.dy) / revoke_prob;
        const Matrix mapped = trace_out_second(v_iso * sigma * v_iso.adjoint(), ws.dxp, ws.de);
        c.extract_prob = (ws.s_single.adjoint() * mapped * ws.s_single)(0, 0).real();
        c.rhs = ws.factor * revoke_prob * c.extract_prob;
    }
    c.slack = c.lhs - c.rhs;
    c.ok = c.slack >= -kTol;
    return c;
}

}  // namespace

DistinctExtractionParams::DistinctExtractionParams(int width_in, std::vector<uint64_t> subset_in,
                                                   int copies_in, int env_qubits_in,
                                                   int extra_qubits_in, uint64_t instances_in)
    : width(width_in),
      subset(std::move(subset_in)),
      copies(copies_in),
      env_qubits(env_qubits_in),
      extra_qubits(extra_qubits_in),
      instances(instances_in) {
    if (width < 1 || width > 6) throw BadParameter("DistinctExtractionParams: width outside [1, 6]");
    if (copies < 1) throw BadParameter("DistinctExtractionParams: copies must be >= 1");
    if (env_qubits < 1) throw BadParameter("DistinctExtractionParams: env_qubits must be >= 1");
    if (extra_qubits < 0) throw BadParameter("DistinctExtractionParams: extra_qubits must be >= 0");
    const int64_t total_qubits = int64_t{width} * copies + env_qubits;
    if (total_qubits > 12) throw BudgetExceeded("DistinctExtractionParams: joint system too large");
    if (int64_t{1} << (width + extra_qubits) < int64_t{1} << env_qubits) {
        throw BadParameter("DistinctExtractionParams: isometry needs dim(X')*dim(E) >= dim(Y)");
    }
}

namespace {

Workspace make_workspace(const DistinctExtractionParams& params) {
    Workspace ws;
    ws.width = params.width;
    ws.copies = params.copies;
    ws.subset = params.subset;
    ws.dx = int64_t{1} << (params.width * params.copies);
    ws.dy = int64_t{1} << params.env_qubits;
    ws.dxp = int64_t{1} << params.width;
    ws.de = int64_t{1} << params.extra_qubits;

    const SubsetState subset_state(params.width, params.subset);
    ws.s_single = subset_to_dense(subset_state).amplitudes();
    ws.s_copies = tensor_power(subset_to_dense(subset_state), params.copies).amplitudes();

    const double s_size = static_cast<double>(params.subset.size());
    double factor = 1.0;
    for (int j = 1; j <= params.copies; ++j) factor *= (s_size - j) / s_size;
    ws.factor = factor;
    return ws;
}

}  // namespace

DistinctExtractionCase check_distinct_extraction_instance(const DistinctExtractionParams& params,
                                                          const Eigen::MatrixXcd& rho,
                                                          const Eigen::MatrixXcd& isometry) {
    const Workspace ws = make_workspace(params);
    if (rho.rows() != ws.dx * ws.dy || rho.cols() != ws.dx * ws.dy) {
        throw DimensionMismatch("check_distinct_extraction_instance: rho dimension");
    }
    if (isometry.rows() != ws.dxp * ws.de || isometry.cols() != ws.dy) {
        throw DimensionMismatch("check_distinct_extraction_instance: isometry dimension");
    }
    return evaluate(ws, rho, isometry);
}

DistinctExtractionReport check_distinct_extraction(const DistinctExtractionParams& params,
                                                   SplitRng& rng) {
    Workspace ws = make_workspace(params);
    const double factor = ws.factor;

    DistinctExtractionReport report;
    report.factor = factor;

    // Closed-form instance: rho = |S^k><S^k| (x) |S><S| with the identity
    // embedding Y -> X'; both sides equal the distinct-tuple fraction.
    {
        Workspace cf = ws;
        cf.dy = cf.dxp;
        cf.de = 1;
        Vector rho_vec(cf.dx * cf.dy);
        for (int64_t x = 0; x < cf.dx; ++x) {
            rho_vec.segment(x * cf.dy, cf.dy) = cf.s_copies(x) * cf.s_single;
        }
        const Matrix rho = rho_vec * rho_vec.adjoint();
        const Matrix v_iso = Matrix::Identity(cf.dxp * cf.de, cf.dy);
        report.closed_form = evaluate(cf, rho, v_iso);
    }

    // Zero-overlap instance: an X state orthogonal to |S>^{(x)k} never
    // passes revocation, so the right side vanishes.
    if (params.subset.size() >= 2) {
        Workspace zo = ws;
        zo.dy = zo.dxp;
        zo.de = 1;
        Vector x_state = Vector::Zero(zo.dx);
        uint64_t lo = 0, hi = 0;
        for (int c = 0; c < params.copies; ++c) {
            lo = (lo << params.width) | params.subset[0];
            hi = (hi << params.width) | params.subset[1];
        }
        x_state(static_cast<int64_t>(lo)) = M_SQRT1_2;
        x_state(static_cast<int64_t>(hi)) = -M_SQRT1_2;
        Vector rho_vec(zo.dx * zo.dy);
        for (int64_t x = 0; x < zo.dx; ++x) {
            rho_vec.segment(x * zo.dy, zo.dy) = x_state(x) * zo.s_single;
        }
        const Matrix rho = rho_vec * rho_vec.adjoint();
        const Matrix v_iso = Matrix::Identity(zo.dxp * zo.de, zo.dy);
        report.zero_overlap = evaluate(zo, rho, v_iso);
    } else {
        report.zero_overlap.ok = true;
    }

    for (uint64_t i = 0; i < params.instances; ++i) {
        SplitRng irng = rng.split(i);
        const Vector psi = haar_vector(ws.dx * ws.dy, irng);
        const Matrix rho = psi * psi.adjoint();
        const Matrix v_iso = haar_isometry(ws.dxp * ws.de, ws.dy, irng);
        report.random_cases.push_back(evaluate(ws, rho, v_iso));
    }

    report.all_ok = report.closed_form.ok && report.zero_overlap.ok;
    for (const auto& c : report.random_cases) report.all_ok = report.all_ok && c.ok;
    return report;
}

}  // namespace revoq
