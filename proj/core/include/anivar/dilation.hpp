#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace anivar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct DilationOptions {
    int level_cap = 40;
    double series_tolerance = 1e-14;
    int max_series_terms = 200000;
    std::size_t quasi_triangle_pairs = 20000;
    std::uint64_t quasi_triangle_seed = 0x5eed;
};

// x + B_k with B_k = A^k Δ.
struct DilatedBall {
    Vector center;
    int scale = 0;
};

class Dilation {
public:
    explicit Dilation(const Matrix& a, const DilationOptions& options = {});

    const Matrix& matrix() const { return a_; }
    int dim() const { return static_cast<int>(a_.rows()); }
    double b() const { return b_; }
    double lambda_minus() const { return lambda_minus_; }
    double lambda_plus() const { return lambda_plus_; }
    bool diagonalizable() const { return diagonalizable_; }
    const Matrix& shape() const { return p_; }
    double level_c() const { return c_; }
    double r() const { return r_; }
    int omega() const { return omega_; }
    double quasi_triangle_H() const { return h_; }
    int level_cap() const { return cap_; }
    int series_terms() const { return series_terms_; }
    double frobenius_norm() const { return a_.norm(); }

    // A^k for |k| <= 2*cap + 2.
    const Matrix& power(int k) const;
    // Q_k = (A^-k)^T P A^-k, so B_k = {v : v^T Q_k v < c}; |k| <= cap + 1.
    const Matrix& form(int k) const;
    // b^k from the level table; |k| <= 2*cap + 2.
    double b_power(int k) const;

    double quadratic(const Vector& v, int k) const;
    // Half widths of the axis-aligned bounding box of B_k.
    Vector half_extent(int k) const;
    // Largest Euclidean radius with the ball inside B_k.
    double inscribed_radius(int k) const;

    // k with x in B_{k+1} \ B_k, empty for x = 0. Throws ScaleOverflow.
    std::optional<int> level(const Vector& x) const;

    // max ||t + sqrt(c) N_d y||^2 over |y| <= 1 with N_d = R A^d R^-1, d <= 0.
    double max_form_over_ball(int d, const Vector& t) const;
    const Matrix& cholesky_factor() const { return chol_r_; }

private:
    struct ContainmentCache {
        Matrix nv;             // N V
        Vector sigma;          // eigenvalues of N^T N, ascending
        Matrix ntr;            // (N V)^T, for g = V^T N^T t
    };

    Matrix a_;
    int cap_;
    double b_ = 0;
    double lambda_minus_ = 0;
    double lambda_plus_ = 0;
    bool diagonalizable_ = true;
    Matrix p_;
    double c_ = 0;
    double r_ = 0;
    int omega_ = 0;
    double h_ = 0;
    int series_terms_ = 0;
    std::vector<Matrix> powers_;
    std::vector<Matrix> forms_;
    std::vector<double> b_table_;
    Matrix chol_r_;
    std::vector<ContainmentCache> containment_;
};

inline Dilation new_dilation(const Matrix& a, const DilationOptions& options = {})
{
    return Dilation(a, options);
}

bool ball_contains(const Dilation& d, const DilatedBall& ball, const Vector& x);
double ball_volume(const Dilation& d, const DilatedBall& ball);
double step_quasi_norm(const Dilation& d, const Vector& x);
// Closure containment of inner in outer.
bool ball_containment(const Dilation& d, const DilatedBall& inner, const DilatedBall& outer);

double unit_ball_volume(int n);
double monte_carlo_volume(const Dilation& d, int k, std::size_t samples, std::uint64_t seed);
double estimate_quasi_triangle(const Dilation& d, std::size_t pairs, std::uint64_t seed);

}  // namespace anivar
