#pragma once

#include "alphaconc/alpha.hpp"
#include "alphaconc/distributions.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace alphaconc {

/// Dense symmetric matrix. Construction from an asymmetric input replaces it
/// by (A + A^T)/2 and records that it did so.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Eigen::MatrixXd entries);

    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(const std::vector<double>& diag);

    std::size_t n() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    bool symmetrized() const noexcept { return symmetrized_; }

private:
    Eigen::MatrixXd m_;
    bool symmetrized_ = false;
};

struct NormBundle {
    double hs = 0.0;
    double op = 0.0;
    double row_max = 0.0;  // max_i of the Euclidean norm of row i
    double diag_hs = 0.0;
    double max_abs_diag = 0.0;
};

inline constexpr double kOpNormTolerance = 1e-10;
inline constexpr std::size_t kOpNormMaxSteps = 100000;
inline constexpr std::size_t kDenseFallbackLimit = 512;

/// Largest |eigenvalue| by power iteration (three fixed-seed starts). Falls
/// back to a dense eigensolver for n <= 512 when the iteration stalls.
double operator_norm(const SymMatrix& a);

NormBundle norm_bundle(const SymMatrix& a);

/// Largest singular value of a general dense matrix.
double spectral_norm(const Eigen::MatrixXd& a);
double row_max_norm(const Eigen::MatrixXd& a);

/// x^T A x - sum_i a_ii var_i.
double quadratic_form_centered(const SymMatrix& a, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& variances);

inline constexpr std::size_t kAl12MaxDimension = 64;

/// phi(z) = min(z^2, |z|^alpha), the per-coordinate cost in the AL12 constraint sets.
double al12_phi(double z, AlphaParam alpha);

/// Exact maximizer of sum w_i z_i over z >= 0 with sum phi(z_i) <= p, w >= 0.
struct PhiBallSupport {
    double value = 0.0;
    std::vector<double> z;
};

PhiBallSupport phi_ball_support(const std::vector<double>& w, double p, AlphaParam alpha);

struct Al12Result {
    double value = 0.0;
    std::vector<double> restart_values;  // one per start, in the fixed start order
    Eigen::VectorXd x;                   // maximizer (coupled: radial vector z)
    Eigen::VectorXd y;                   // decoupled only
};

/// 2 sup { sum a_ij x_ij : sum_i phi(|x_i.|_2) <= p }. With x_ij = z_i y_ij
/// and unit rows y_i. the inner supremum is sum_i z_i |a_i.|, leaving a
/// support function of the phi-ball that is solved exactly.
Al12Result al12_norm_coupled_detailed(const Eigen::MatrixXd& a, double p, AlphaParam alpha);
double al12_norm_coupled(const Eigen::MatrixXd& a, double p, AlphaParam alpha);

/// sup { x^T A y : sum phi(x_i) <= p, sum phi(y_j) <= p } by alternating exact
/// maximization from a fixed list of starts. The value is attained by the
/// returned (x, y), so it is a certified lower bound.
inline constexpr std::size_t kAl12Restarts = 10;
Al12Result al12_norm_decoupled_detailed(const Eigen::MatrixXd& a, double p, AlphaParam alpha);
double al12_norm_decoupled(const Eigen::MatrixXd& a, double p, AlphaParam alpha);

/// 2 p^(1/2) |A|_HS + 2 p |A|_m.
double al12_coupled_upper(const Eigen::MatrixXd& a, double p);
/// 4 p^(2/alpha) |A|_op.
double al12_decoupled_upper(const Eigen::MatrixXd& a, double p, AlphaParam alpha);

/// Matrix files: whitespace or comma separated rows, or the binary layout
/// (uint64 n, then n*n little-endian doubles, row-major).
Eigen::MatrixXd read_matrix_text(std::istream& in);
Eigen::MatrixXd read_matrix_binary(std::istream& in);
/// Dispatches on the ".bin" extension.
Eigen::MatrixXd read_matrix_file(const std::string& path);
void write_matrix_text(std::ostream& out, const Eigen::MatrixXd& a);
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& a);

enum class Ensemble { goe, sparse_sign, diag };

std::string to_string(Ensemble e);
Ensemble parse_ensemble(const std::string& name);

/// goe: off-diagonal N(0,1), diagonal N(0,2), scaled by 1/sqrt(n).
/// sparse_sign: each upper-triangular entry is +-1 with probability `density`, else 0.
/// diag: diagonal with i.i.d. N(0,1) entries.
SymMatrix sample_ensemble(Ensemble e, std::size_t n, StreamKey key, double density = 0.1);

}  // namespace alphaconc
