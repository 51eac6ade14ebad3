#pragma once

#include <cstddef>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"

namespace anivar {

using MultiIndex = std::vector<int>;

// All gamma with |gamma| <= s, ordered by total degree then lexicographically descending.
std::vector<MultiIndex> multi_indices(int n, int s);
std::size_t polynomial_dimension(int n, int s);
double monomial(const Vector& u, const MultiIndex& gamma);

// Degree <= s polynomial in local coordinates u = L (x - center).
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(int n, int s);
    Polynomial(int s, Vector center, Matrix to_local, Vector coeffs);
    static Polynomial in_ball(const Dilation& d, const DilatedBall& ball, int s, const Vector& coeffs);

    int dim() const { return static_cast<int>(center_.size()); }
    int degree() const { return s_; }
    const std::vector<MultiIndex>& indices() const { return idx_; }
    const Vector& coefficients() const { return coeffs_; }
    Vector& coefficients() { return coeffs_; }
    const Vector& center() const { return center_; }
    const Matrix& to_local() const { return to_local_; }

    Vector local(const Vector& x) const { return to_local_ * (x - center_); }
    double evaluate_local(const Vector& u) const;
    double evaluate(const Vector& x) const { return evaluate_local(local(x)); }

private:
    int s_ = 0;
    std::vector<MultiIndex> idx_;
    Vector center_;
    Matrix to_local_;
    Vector coeffs_;
};

inline double evaluate(const Polynomial& p, const Vector& x)
{
    return p.evaluate(x);
}

// Lattice points of a ball with their local monomial rows.
struct BallSamples {
    DilatedBall ball;
    int s = 0;
    std::vector<std::size_t> points;
    Matrix basis;  // points x dim(P_s)
    double cell_volume = 0;
};

BallSamples ball_samples(const Grid& grid, const Dilation& d, const DilatedBall& ball, int s);
BallSamples ball_samples(const Grid& grid, const Dilation& d, const DilatedBall& ball, int s,
                         std::vector<std::size_t> points);

Polynomial minimizing_polynomial(const GridFunction& f, const Dilation& d, const DilatedBall& ball, int s);
Polynomial minimizing_polynomial(const GridFunction& f, const Dilation& d, const BallSamples& bs);

// sum over ball points of |f - P|^q * cell_volume.
double lq_error(const GridFunction& f, const BallSamples& bs, const Vector& coeffs, double q);

struct LqFit {
    Polynomial projection;
    Polynomial refined;
    double projection_error = 0;  // integral of |f - P|^q over the ball
    double refined_error = 0;
    int sweeps = 0;
};

// Coordinate descent from the L2 projection towards the L^q best polynomial.
LqFit refine_lq(const GridFunction& f, const Dilation& d, const BallSamples& bs, double q, int sweeps = 20);

// Integrals of f * x^gamma (global coordinates) for |gamma| <= s.
std::vector<double> moments(const GridFunction& f, int s);
std::vector<double> moments(const GridFunction& f, const std::vector<std::size_t>& region, int s);
std::vector<double> moments(const GridFunction& f, const Dilation& d, const DilatedBall& ball, int s);
// Same in ball-local coordinates u = A^-k (x - center).
std::vector<double> local_moments(const GridFunction& f, const Dilation& d, const DilatedBall& ball, int s);

}  // namespace anivar
