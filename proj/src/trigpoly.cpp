#include "lab/trigpoly.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <tuple>

namespace lab {

namespace {

using Key = std::tuple<int, int, int, int, std::uint64_t, std::uint64_t,
                       std::uint64_t>;

Key term_key(const TrigTerm& t) {
    return {t.p[0], t.p[1], t.p[2], t.trig,
            std::bit_cast<std::uint64_t>(t.k[0]),
            std::bit_cast<std::uint64_t>(t.k[1]),
            std::bit_cast<std::uint64_t>(t.k[2])};
}

bool pure_monomial(const TrigTerm& t) {
    return t.k[0] == 0.0 && t.k[1] == 0.0 && t.k[2] == 0.0;
}

}  // namespace

TrigPoly::TrigPoly(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {
    normalize();
}

TrigPoly TrigPoly::constant(double c) { return monomial(c, 0, 0, 0); }

TrigPoly TrigPoly::monomial(double c, int p1, int p2, int p3) {
    return TrigPoly({TrigTerm{c, {p1, p2, p3}, {0, 0, 0}, 0}});
}

TrigPoly TrigPoly::wave(double c, std::array<int, 3> p,
                        std::array<double, 3> k, bool is_sin) {
    return TrigPoly({TrigTerm{c, p, k, is_sin ? 1 : 0}});
}

void TrigPoly::normalize() {
    std::map<Key, TrigTerm> merged;
    for (TrigTerm t : terms_) {
        if (t.c == 0.0) continue;
        if (pure_monomial(t) && t.trig == 1) continue;  // sin(0) == 0
        auto [it, fresh] = merged.emplace(term_key(t), t);
        if (!fresh) it->second.c += t.c;
    }
    terms_.clear();
    for (auto& [key, t] : merged)
        if (t.c != 0.0) terms_.push_back(t);
}

TrigPoly TrigPoly::dx(int i) const {
    std::vector<TrigTerm> out;
    for (const TrigTerm& t : terms_) {
        if (t.p[i] > 0) {
            TrigTerm u = t;
            u.c *= t.p[i];
            u.p[i] -= 1;
            out.push_back(u);
        }
        if (t.k[i] != 0.0) {
            TrigTerm u = t;
            // cos' = -sin, sin' = cos
            u.c *= (t.trig == 0) ? -t.k[i] : t.k[i];
            u.trig = 1 - t.trig;
            out.push_back(u);
        }
    }
    return TrigPoly(std::move(out));
}

TrigPoly TrigPoly::mul_x(int i) const {
    std::vector<TrigTerm> out = terms_;
    for (TrigTerm& t : out) t.p[i] += 1;
    return TrigPoly(std::move(out));
}

TrigPoly TrigPoly::dbar(int i) const {
    const int j = (i + 1) % 3, l = (i + 2) % 3;
    return dx(l).mul_x(j) - dx(j).mul_x(l);
}

double TrigPoly::eval(const Eigen::Vector3d& x) const {
    double s = 0.0;
    for (const TrigTerm& t : terms_) {
        double m = t.c;
        for (int i = 0; i < 3; ++i)
            for (int q = 0; q < t.p[i]; ++q) m *= x[i];
        if (!pure_monomial(t)) {
            const double th = t.k[0] * x[0] + t.k[1] * x[1] + t.k[2] * x[2];
            m *= (t.trig == 0) ? std::cos(th) : std::sin(th);
        }
        s += m;
    }
    return s;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    std::vector<TrigTerm> out = terms_;
    out.insert(out.end(), o.terms_.begin(), o.terms_.end());
    return TrigPoly(std::move(out));
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
    return *this + o.scaled(-1.0);
}

TrigPoly TrigPoly::scaled(double s) const {
    std::vector<TrigTerm> out = terms_;
    for (TrigTerm& t : out) t.c *= s;
    return TrigPoly(std::move(out));
}

bool TrigPoly::is_constant() const {
    for (const TrigTerm& t : terms_)
        if (!pure_monomial(t) || t.p != std::array<int, 3>{0, 0, 0})
            return false;
    return true;
}

Eigen::Vector3d SymbolicMap3::eval(const Eigen::Vector3d& x) const {
    return {comp[0].eval(x), comp[1].eval(x), comp[2].eval(x)};
}

Eigen::Matrix3d SymbolicMap3::grad(const Eigen::Vector3d& x) const {
    Eigen::Matrix3d G;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) G(i, j) = comp[i].dx(j).eval(x);
    return G;
}

Eigen::Matrix3d SymbolicMap3::grad2(const Eigen::Vector3d& x, int j) const {
    Eigen::Matrix3d H;
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) H(r, s) = comp[r].dx(s).dx(j).eval(x);
    return H;
}

SymbolicMap3 SymbolicMap3::identity() {
    SymbolicMap3 m;
    m.comp[0] = TrigPoly::monomial(1.0, 1, 0, 0);
    m.comp[1] = TrigPoly::monomial(1.0, 0, 1, 0);
    m.comp[2] = TrigPoly::monomial(1.0, 0, 0, 1);
    return m;
}

SymbolicMap3 SymbolicMap3::affine(const Eigen::Matrix3d& M,
                                  const Eigen::Vector3d& c) {
    SymbolicMap3 m;
    for (int i = 0; i < 3; ++i) {
        TrigPoly row = TrigPoly::constant(c[i]);
        for (int j = 0; j < 3; ++j) {
            const int p1 = (j == 0), p2 = (j == 1), p3 = (j == 2);
            row = row + TrigPoly::monomial(M(i, j), p1, p2, p3);
        }
        m.comp[i] = row;
    }
    return m;
}

SymbolicMap3 SymbolicMap3::operator+(const SymbolicMap3& o) const {
    SymbolicMap3 m;
    for (int i = 0; i < 3; ++i) m.comp[i] = comp[i] + o.comp[i];
    return m;
}

SymbolicMap3 SymbolicMap3::operator-(const SymbolicMap3& o) const {
    SymbolicMap3 m;
    for (int i = 0; i < 3; ++i) m.comp[i] = comp[i] - o.comp[i];
    return m;
}

SymbolicMap3 SymbolicMap3::scaled(double s) const {
    SymbolicMap3 m;
    for (int i = 0; i < 3; ++i) m.comp[i] = comp[i].scaled(s);
    return m;
}

bool SymbolicMap3::is_affine() const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!comp[i].dx(j).is_constant()) return false;
    return true;
}

}  // namespace lab
