#pragma once
// Closed symbolic algebra for 3-d test fields: finite sums of terms
//   c * x1^p1 x2^p2 x3^p3 * {cos|sin}(k . x),
// closed under partial differentiation, multiplication by coordinates, and
// hence under the tangential operator  dbar = x x grad.  This gives exact
// derivatives of any order for the polynomial/Fourier test fields used by
// the geometric identity checks and the high-order norm evaluation, with
// no discretization error in space.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace lab {

struct TrigTerm {
    double c = 0.0;
    std::array<int, 3> p{0, 0, 0};      // monomial powers
    std::array<double, 3> k{0, 0, 0};   // wave vector (0 => pure monomial)
    int trig = 0;                       // 0: cos(k.x), 1: sin(k.x)
};

class TrigPoly {
  public:
    TrigPoly() = default;
    explicit TrigPoly(std::vector<TrigTerm> terms);

    static TrigPoly zero() { return TrigPoly(); }
    static TrigPoly constant(double c);
    static TrigPoly monomial(double c, int p1, int p2, int p3);
    // c * x^p * cos(k.x) or sin(k.x)
    static TrigPoly wave(double c, std::array<int, 3> p,
                         std::array<double, 3> k, bool is_sin);

    TrigPoly dx(int i) const;           // d/dx_i, i in 0..2
    TrigPoly mul_x(int i) const;        // multiply by x_i
    TrigPoly dbar(int i) const;         // i-th tangential derivative
    double eval(const Eigen::Vector3d& x) const;

    TrigPoly operator+(const TrigPoly& o) const;
    TrigPoly operator-(const TrigPoly& o) const;
    TrigPoly scaled(double s) const;

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::size_t n_terms() const { return terms_.size(); }
    const std::vector<TrigTerm>& terms() const { return terms_; }

  private:
    std::vector<TrigTerm> terms_;
    void normalize();  // merge terms with identical (p, k, trig) keys
};

using VecPoly3 = std::array<TrigPoly, 3>;

// A map ball -> R^3 at a frozen instant; spatial derivatives are exact.
struct SymbolicMap3 {
    VecPoly3 comp;

    Eigen::Vector3d eval(const Eigen::Vector3d& x) const;
    // Gradient matrix G(i,j) = eta^i,_j.
    Eigen::Matrix3d grad(const Eigen::Vector3d& x) const;
    // Second derivatives H_j(r,s) = eta^r,_{s j} for fixed outer index j.
    Eigen::Matrix3d grad2(const Eigen::Vector3d& x, int j) const;

    static SymbolicMap3 identity();
    static SymbolicMap3 affine(const Eigen::Matrix3d& M,
                               const Eigen::Vector3d& c);
    SymbolicMap3 operator+(const SymbolicMap3& o) const;
    SymbolicMap3 operator-(const SymbolicMap3& o) const;
    SymbolicMap3 scaled(double s) const;
    bool is_affine() const;  // all first derivatives constant
};

}  // namespace lab
