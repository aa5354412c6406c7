#include "alphaconc/specnorms.hpp"

#include "alphaconc/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace alphaconc {

namespace {

void require_finite(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

void require_al12_input(const Eigen::MatrixXd& a, double p, AlphaParam alpha) {
    if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("matrix must be nonempty");
    if (static_cast<std::size_t>(std::max(a.rows(), a.cols())) > kAl12MaxDimension) {
        throw std::invalid_argument("AL12 norms are limited to dimension <= 64");
    }
    require_finite(a);
    if (!(p >= 2.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 2");
    if (!(alpha.value() > 1.0)) throw std::invalid_argument("AL12 norms need alpha in (1, 2]");
}

// Power-iteration start vectors use this fixed seed so results are reproducible.
constexpr std::uint64_t kPowerSeed = 0x6f702d6e6f726dULL;
constexpr std::uint64_t kRestartSeed = 0x616c31322d7273ULL;

Eigen::VectorXd gaussian_vector(std::size_t n, StreamKey key) {
    Engine engine = make_engine(key, 0);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(engine);
    return v;
}

double dense_abs_eigen_max(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DefectError("dense eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double phi_inverse(double p, double alpha) { return p <= 1.0 ? std::sqrt(p) : std::pow(p, 1.0 / alpha); }

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("matrix must be square");
    require_finite(m_);
    if (m_ != m_.transpose()) {
        const Eigen::MatrixXd sym = 0.5 * (m_ + m_.transpose());
        m_ = sym;
        symmetrized_ = true;
    }
}

SymMatrix SymMatrix::identity(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return SymMatrix(Eigen::MatrixXd::Identity(k, k));
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& diag) {
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
    return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

double operator_norm(const SymMatrix& a) {
    const Eigen::MatrixXd& m = a.matrix();
    const std::size_t n = a.n();
    if (n == 0 || m.norm() == 0.0) return 0.0;

    double best = 0.0;
    bool converged_any = false;
    for (std::uint64_t restart = 0; restart < 3; ++restart) {
        Eigen::VectorXd v = gaussian_vector(n, {kPowerSeed, restart});
        v.normalize();
        double estimate = 0.0;
        for (std::size_t step = 0; step < kOpNormMaxSteps; ++step) {
            Eigen::VectorXd w = m * v;
            const double next = w.norm();
            if (next == 0.0) break;
            v = w / next;
            if (std::abs(next - estimate) <= kOpNormTolerance * next) {
                estimate = next;
                converged_any = true;
                break;
            }
            estimate = next;
        }
        best = std::max(best, estimate);
    }
    if (converged_any) return best;
    if (n <= kDenseFallbackLimit) return dense_abs_eigen_max(m);
    throw ResourceError("power iteration did not converge and n is too large for the dense fallback");
}

NormBundle norm_bundle(const SymMatrix& a) {
    const Eigen::MatrixXd& m = a.matrix();
    NormBundle out;
    out.hs = m.norm();
    out.op = operator_norm(a);
    out.row_max = row_max_norm(m);
    out.diag_hs = m.diagonal().norm();
    out.max_abs_diag = m.size() ? m.diagonal().cwiseAbs().maxCoeff() : 0.0;
    return out;
}

double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    require_finite(a);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

double row_max_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    return a.rowwise().norm().maxCoeff();
}

double quadratic_form_centered(const SymMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& variances) {
    const auto n = static_cast<Eigen::Index>(a.n());
    if (x.size() != n || variances.size() != n) {
        throw std::invalid_argument("quadratic form: dimension mismatch");
    }
    const Eigen::MatrixXd& m = a.matrix();
    return x.dot(m * x) - m.diagonal().dot(variances);
}

double al12_phi(double z, AlphaParam alpha) {
    const double u = std::abs(z);
    return u <= 1.0 ? u * u : std::pow(u, alpha.value());
}

PhiBallSupport phi_ball_support(const std::vector<double>& w, double p, AlphaParam alpha) {
    const double a = alpha.value();
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("p must be nonnegative");
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("weights must be finite and >= 0");
    }
    PhiBallSupport best{0.0, std::vector<double>(w.size(), 0.0)};
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) order.push_back(i);
    }
    if (order.empty() || p == 0.0) return best;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return w[i] > w[j]; });

    const double z_top = phi_inverse(p, a);
    best.value = w[order[0]] * z_top;
    best.z[order[0]] = z_top;

    // Stationary points: z_i = (w_i/(a l))^(1/(a-1)) > 1 on the top k
    // coordinates, z_i = w_i/(2 l) < 1 on the rest; l fixed by sum phi = p.
    // Points at the kink z = 1 cannot be optimal unless only one weight is
    // positive, which the z_top candidate covers.
    const double log_a = std::log(a), log_2 = std::log(2.0), log_p = std::log(p);
    const bool has_big_branch = a < 2.0;
    const double big_power = has_big_branch ? a / (a - 1.0) : 2.0;
    std::vector<double> lw(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) lw[r] = std::log(w[order[r]]);

    for (std::size_t k = 0; k <= order.size(); ++k) {
        if (!has_big_branch && k > 0) break;
        const auto log_cost = [&](double mu) {
            double top = -std::numeric_limits<double>::infinity();
            std::vector<double> e(order.size());
            for (std::size_t r = 0; r < order.size(); ++r) {
                e[r] = r < k ? big_power * (lw[r] - log_a - mu) : 2.0 * (lw[r] - log_2 - mu);
                top = std::max(top, e[r]);
            }
            double sum = 0.0;
            for (double x : e) sum += std::exp(x - top);
            return top + std::log(sum) - log_p;
        };
        double lo = lw[0] - 1.0, hi = lw[0] + 1.0;
        for (double width = 1.0; log_cost(lo) <= 0.0; width *= 2.0) lo -= width;
        for (double width = 1.0; log_cost(hi) > 0.0; width *= 2.0) hi += width;
        for (int step = 0; step < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++step) {
            const double mid = 0.5 * (lo + hi);
            if (log_cost(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double mu = hi;
        std::vector<double> z(w.size(), 0.0);
        bool valid = true;
        for (std::size_t r = 0; r < order.size(); ++r) {
            double zr;
            if (r < k) {
                zr = std::exp((lw[r] - log_a - mu) / (a - 1.0));
                valid = valid && zr >= 1.0 - 1e-12;
            } else {
                zr = std::exp(lw[r] - log_2 - mu);
                valid = valid && (zr <= 1.0 + 1e-12 || !has_big_branch);
            }
            z[order[r]] = zr;
        }
        if (!valid) continue;
        // phi(cz) <= c^a phi(z) for c <= 1, so this rescaling restores exact feasibility.
        double cost = 0.0;
        for (double zr : z) cost += al12_phi(zr, alpha);
        if (cost > p) {
            const double c = std::pow(p / cost, 1.0 / a);
            for (double& zr : z) zr *= c;
        }
        double value = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) value += w[i] * z[i];
        if (value > best.value) best = {value, std::move(z)};
    }
    return best;
}

Al12Result al12_norm_coupled_detailed(const Eigen::MatrixXd& a, double p, AlphaParam alpha) {
    require_al12_input(a, p, alpha);
    const Eigen::VectorXd rows = a.rowwise().norm();
    const std::vector<double> w(rows.data(), rows.data() + rows.size());
    const PhiBallSupport s = phi_ball_support(w, p, alpha);
    Al12Result out;
    out.value = 2.0 * s.value;
    out.restart_values = {out.value};
    out.x = Eigen::Map<const Eigen::VectorXd>(s.z.data(), static_cast<Eigen::Index>(s.z.size()));
    return out;
}

double al12_norm_coupled(const Eigen::MatrixXd& a, double p, AlphaParam alpha) {
    return al12_norm_coupled_detailed(a, p, alpha).value;
}

namespace {

// argmax <g, x> over the phi-ball, with signs taken from g.
Eigen::VectorXd signed_support(const Eigen::VectorXd& g, double p, AlphaParam alpha, double* value) {
    std::vector<double> w(static_cast<std::size_t>(g.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) w[static_cast<std::size_t>(i)] = std::abs(g(i));
    const PhiBallSupport s = phi_ball_support(w, p, alpha);
    Eigen::VectorXd x(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        x(i) = g(i) < 0.0 ? -s.z[static_cast<std::size_t>(i)] : s.z[static_cast<std::size_t>(i)];
    }
    if (value) *value = s.value;
    return x;
}

}  // namespace

Al12Result al12_norm_decoupled_detailed(const Eigen::MatrixXd& a, double p, AlphaParam alpha) {
    require_al12_input(a, p, alpha);
    Al12Result out;
    out.x = Eigen::VectorXd::Zero(a.rows());
    out.y = Eigen::VectorXd::Zero(a.cols());
    if (a.norm() == 0.0) {
        out.restart_values.assign(kAl12Restarts + 1, 0.0);
        return out;
    }

    std::vector<Eigen::VectorXd> starts;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    starts.push_back(svd.matrixU().col(0));
    for (std::uint64_t r = 0; r < kAl12Restarts; ++r) {
        starts.push_back(gaussian_vector(static_cast<std::size_t>(a.rows()), {kRestartSeed, r}));
    }

    double best = -1.0;
    for (const Eigen::VectorXd& g : starts) {
        Eigen::VectorXd x = signed_support(g, p, alpha, nullptr);
        Eigen::VectorXd y;
        double value = -std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 10000; ++iter) {
            double vy = 0.0, vx = 0.0;
            y = signed_support(a.transpose() * x, p, alpha, &vy);
            x = signed_support(a * y, p, alpha, &vx);
            const double improvement = vx - value;
            value = vx;
            if (improvement <= 1e-14 * std::abs(vx)) break;
        }
        // Report the bilinear form at the final pair; it is attained, hence a lower bound.
        y = signed_support(a.transpose() * x, p, alpha, nullptr);
        value = x.dot(a * y);
        out.restart_values.push_back(value);
        if (value > best) {
            best = value;
            out.x = x;
            out.y = y;
        }
    }
    out.value = best;
    return out;
}

double al12_norm_decoupled(const Eigen::MatrixXd& a, double p, AlphaParam alpha) {
    return al12_norm_decoupled_detailed(a, p, alpha).value;
}

double al12_coupled_upper(const Eigen::MatrixXd& a, double p) {
    return 2.0 * std::sqrt(p) * a.norm() + 2.0 * p * row_max_norm(a);
}

double al12_decoupled_upper(const Eigen::MatrixXd& a, double p, AlphaParam alpha) {
    return 4.0 * std::pow(p, 2.0 / alpha.value()) * spectral_norm(a);
}

Eigen::MatrixXd read_matrix_text(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream tokens(line);
        std::vector<double> row;
        std::string token;
        while (tokens >> token) {
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size() || !std::isfinite(v)) {
                throw ParseError("bad matrix entry '" + token + "'", line_no);
            }
            row.push_back(v);
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("ragged matrix row", line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("matrix file is empty");
    if (rows.size() != rows.front().size()) throw ParseError("matrix must be square");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return a;
}

namespace {

std::uint64_t read_u64_le(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("truncated binary matrix");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

}  // namespace

Eigen::MatrixXd read_matrix_binary(std::istream& in) {
    const std::uint64_t n = read_u64_le(in);
    if (n == 0 || n > (std::uint64_t{1} << 15)) throw ParseError("binary matrix dimension out of range");
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = std::bit_cast<double>(read_u64_le(in));
    }
    require_finite(a);
    return a;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
    const bool binary = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw ParseError("cannot open matrix file '" + path + "'");
    return binary ? read_matrix_binary(in) : read_matrix_text(in);
}

void write_matrix_text(std::ostream& out, const Eigen::MatrixXd& a) {
    char buf[32];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("binary layout needs a square matrix");
    write_u64_le(out, static_cast<std::uint64_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) write_u64_le(out, std::bit_cast<std::uint64_t>(a(i, j)));
    }
}

std::string to_string(Ensemble e) {
    switch (e) {
        case Ensemble::goe: return "goe";
        case Ensemble::sparse_sign: return "sparse-sign";
        case Ensemble::diag: return "diag";
    }
    return "unknown";
}

Ensemble parse_ensemble(const std::string& name) {
    if (name == "goe") return Ensemble::goe;
    if (name == "sparse-sign") return Ensemble::sparse_sign;
    if (name == "diag") return Ensemble::diag;
    throw std::invalid_argument("unknown matrix ensemble '" + name + "'");
}

SymMatrix sample_ensemble(Ensemble e, std::size_t n, StreamKey key, double density) {
    if (n == 0) throw std::invalid_argument("ensemble dimension must be positive");
    const auto k = static_cast<Eigen::Index>(n);
    Engine engine = make_engine(key, 0);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    switch (e) {
        case Ensemble::goe: {
            const double s = 1.0 / std::sqrt(static_cast<double>(n));
            for (Eigen::Index i = 0; i < k; ++i) {
                a(i, i) = std::sqrt(2.0) * normal(engine) * s;
                for (Eigen::Index j = i + 1; j < k; ++j) a(i, j) = a(j, i) = normal(engine) * s;
            }
            break;
        }
        case Ensemble::sparse_sign: {
            if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in (0, 1]");
            for (Eigen::Index i = 0; i < k; ++i) {
                for (Eigen::Index j = i; j < k; ++j) {
                    const bool keep = uniform_open01(engine) < density;
                    const double sign = (engine() >> 63) ? 1.0 : -1.0;
                    if (keep) a(i, j) = a(j, i) = sign;
                }
            }
            break;
        }
        case Ensemble::diag:
            for (Eigen::Index i = 0; i < k; ++i) a(i, i) = normal(engine);
            break;
    }
    return SymMatrix(std::move(a));
}

}  // namespace alphaconc
