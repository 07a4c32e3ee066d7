#ifndef HERG_POLY_HPP
#define HERG_POLY_HPP

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace herg {

using Q = mpq_class;

inline Q qint(long v) { return Q(v); }

inline std::string qstr(const Q& q)
{
    // always p/q so json output is uniform
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Q parse_q(const std::string& s)
{
    Q q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational: " + s);
    q.canonicalize();
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + s);
    return q;
}

// Sorted by variable name, no zero exponents.
using Exps = std::vector<std::pair<std::string, Q>>;

inline Q total_degree(const Exps& m)
{
    Q t = 0;
    for (auto& [v, e] : m) t += e;
    return t;
}

// Graded lex: higher total degree first, then the larger exponent on the
// first variable (in name order) where the two differ.
struct GradedLex {
    bool operator()(const Exps& a, const Exps& b) const
    {
        Q da = total_degree(a), db = total_degree(b);
        if (da != db) return da > db;
        size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                if (a[i].second != 0) return a[i].second > 0;
                ++i;
            } else if (i == a.size() || b[j].first < a[i].first) {
                if (b[j].second != 0) return b[j].second < 0;
                ++j;
            } else {
                if (a[i].second != b[j].second) return a[i].second > b[j].second;
                ++i, ++j;
            }
        }
        return false;
    }
};

inline Exps exps_mul(const Exps& a, const Exps& b)
{
    Exps r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            Q e = a[i].second + b[j].second;
            if (e != 0) r.emplace_back(a[i].first, e);
            ++i, ++j;
        }
    }
    return r;
}

inline Exps exps_scale(const Exps& a, const Q& k)
{
    Exps r;
    if (k == 0) return r;
    for (auto& [v, e] : a) r.emplace_back(v, e * k);
    return r;
}

inline Q exps_get(const Exps& a, const std::string& v)
{
    for (auto& [n, e] : a)
        if (n == v) return e;
    return 0;
}

inline Exps exps_without(const Exps& a, const std::string& v)
{
    Exps r;
    for (auto& p : a)
        if (p.first != v) r.push_back(p);
    return r;
}

// Build from unsorted (name, exp) pairs; repeated names accumulate.
inline Exps make_exps(std::vector<std::pair<std::string, Q>> raw)
{
    std::sort(raw.begin(), raw.end(),
              [](auto& x, auto& y) { return x.first < y.first; });
    Exps r;
    for (auto& p : raw) {
        if (!r.empty() && r.back().first == p.first)
            r.back().second += p.second;
        else
            r.push_back(p);
    }
    r.erase(std::remove_if(r.begin(), r.end(),
                           [](auto& p) { return p.second == 0; }),
            r.end());
    return r;
}

class Poly {
public:
    using Terms = std::map<Exps, Q, GradedLex>;

    Poly() = default;
    Poly(long c) { if (c) t_[Exps{}] = Q(c); }
    Poly(const Q& c) { if (c != 0) t_[Exps{}] = c; }

    static Poly var(const std::string& name, const Q& e = 1)
    {
        return monomial(1, e == 0 ? Exps{} : Exps{{name, e}});
    }
    static Poly monomial(const Q& c, Exps m)
    {
        Poly p;
        if (c != 0) p.t_[std::move(m)] = c;
        return p;
    }

    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    size_t size() const { return t_.size(); }
    bool is_monomial() const { return t_.size() == 1; }

    void add_term(const Exps& m, const Q& c)
    {
        if (c == 0) return;
        auto it = t_.find(m);
        if (it == t_.end()) {
            t_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o)
    {
        for (auto& [m, c] : o.t_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o)
    {
        for (auto& [m, c] : o.t_) add_term(m, -c);
        return *this;
    }
    Poly operator-() const
    {
        Poly r = *this;
        for (auto& [m, c] : r.t_) c = -c;
        return r;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b)
    {
        Poly r;
        for (auto& [ma, ca] : a.t_)
            for (auto& [mb, cb] : b.t_) r.add_term(exps_mul(ma, mb), ca * cb);
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly scaled(const Q& k) const
    {
        Poly r;
        if (k == 0) return r;
        r.t_ = t_;
        for (auto& [m, c] : r.t_) c *= k;
        return r;
    }

    // Negative powers only exist for monomials.
    Poly pow(long n) const
    {
        if (n < 0) {
            if (!is_monomial())
                throw std::domain_error("negative power of a non-monomial");
            auto& [m, c] = *t_.begin();
            Q ic = 1 / c;
            Q cc = 1;
            for (long i = 0; i < -n; ++i) cc *= ic;
            return monomial(cc, exps_scale(m, n));
        }
        Poly r(1), b = *this;
        while (n) {
            if (n & 1) r *= b;
            n >>= 1;
            if (n) b *= b;
        }
        return r;
    }

    // Rational powers are allowed for monomials with coefficient 1.
    Poly rpow(const Q& e) const
    {
        if (e.get_den() == 1) return pow(e.get_num().get_si());
        if (!is_monomial() || t_.begin()->second != 1)
            throw std::domain_error("fractional power of a non-unit-monomial");
        return monomial(1, exps_scale(t_.begin()->first, e));
    }

    Q degree(const std::string& v) const
    {
        bool first = true;
        Q d = 0;
        for (auto& [m, c] : t_) {
            Q e = exps_get(m, v);
            if (first || e > d) d = e;
            first = false;
        }
        return d;
    }

    std::vector<std::string> variables() const
    {
        std::vector<std::string> vs;
        for (auto& [m, c] : t_)
            for (auto& [v, e] : m) vs.push_back(v);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return vs;
    }

    Q evaluate(const std::map<std::string, Q>& at) const
    {
        Q s = 0;
        for (auto& [m, c] : t_) {
            Q term = c;
            for (auto& [v, e] : m) {
                auto it = at.find(v);
                if (it == at.end()) throw std::invalid_argument("unbound variable " + v);
                if (e.get_den() != 1) throw std::domain_error("fractional exponent in evaluate");
                long k = e.get_num().get_si();
                if (it->second == 0 && k < 0) throw std::domain_error("division by zero in evaluate");
                Q b = k < 0 ? Q(1 / it->second) : it->second;
                for (long i = 0; i < std::labs(k); ++i) term *= b;
            }
            s += term;
        }
        return s;
    }

    // Variables not in the map are left alone.
    Poly substitute(const std::map<std::string, Poly>& sub) const
    {
        Poly r;
        std::map<std::pair<std::string, std::string>, Poly> cache;
        for (auto& [m, c] : t_) {
            Exps keep;
            Poly acc(c);
            for (auto& [v, e] : m) {
                auto it = sub.find(v);
                if (it == sub.end()) {
                    keep.emplace_back(v, e);
                    continue;
                }
                auto key = std::make_pair(v, e.get_str());
                auto ct = cache.find(key);
                if (ct == cache.end())
                    ct = cache.emplace(key, it->second.rpow(e)).first;
                acc *= ct->second;
            }
            r += acc * monomial(1, keep);
        }
        return r;
    }

    // Each listed variable must appear with exponent 0 or 1; a monomial
    // containing v takes num[v], otherwise den[v].
    Poly substitute_multilinear(
        const std::map<std::string, std::pair<Poly, Poly>>& nd) const
    {
        for (auto& [m, c] : t_)
            for (auto& [v, e] : m)
                if (nd.count(v) && e != 1)
                    throw std::domain_error("not multilinear in " + v);
        Poly r;
        for (auto& [m, c] : t_) {
            Exps keep;
            Poly acc(c);
            for (auto& [v, e] : m)
                if (!nd.count(v)) keep.emplace_back(v, e);
            for (auto& [v, pr] : nd)
                acc *= exps_get(m, v) == 1 ? pr.first : pr.second;
            r += acc * monomial(1, keep);
        }
        return r;
    }

    // Apply f to every monomial (f returns the image of the bare monomial).
    template <class F>
    Poly map_terms(F&& f) const
    {
        Poly r;
        for (auto& [m, c] : t_) r += f(m).scaled(c);
        return r;
    }

    std::string str() const
    {
        if (t_.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto& [m, c] : t_) {
            Q ac = abs(c);
            if (!first) s += c < 0 ? " - " : " + ";
            else if (c < 0) s += "-";
            first = false;
            bool unit = ac == 1 && !m.empty();
            if (!unit) s += ac.get_str();
            bool lead = !unit;
            for (auto& [v, e] : m) {
                if (lead) s += "*";
                lead = true;
                s += v;
                if (e != 1) s += e.get_den() == 1 && e > 0 ? "^" + e.get_str() : "^(" + e.get_str() + ")";
            }
        }
        return s;
    }

private:
    Terms t_;
};

inline Poly pvar(const std::string& n, long e = 1) { return Poly::var(n, Q(e)); }

} // namespace herg

#endif
