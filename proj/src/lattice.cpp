#include "ttlat/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ttlat::lattice {

namespace {

void require_positive(Int v, const char* what) {
    if (v < 1) throw std::invalid_argument(std::string(what) + " must be positive");
}

Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in lcm");
    return r;
}

// (prime, exponent) pairs by trial division.
std::vector<std::pair<Int, int>> factorize(Int k) {
    std::vector<std::pair<Int, int>> f;
    for (Int p = 2; p * p <= k; ++p) {
        if (k % p) continue;
        int e = 0;
        while (k % p == 0) { k /= p; ++e; }
        f.emplace_back(p, e);
    }
    if (k > 1) f.emplace_back(k, 1);
    return f;
}

std::vector<Int> divisors_from_factors(const std::vector<std::pair<Int, int>>& f) {
    std::vector<Int> divs{1};
    for (auto [p, e] : f) {
        size_t base = divs.size();
        Int pk = 1;
        for (int j = 0; j < e; ++j) {
            pk *= p;
            for (size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

} // namespace

Int gcd(Int a, Int b) {
    require_positive(a, "gcd argument");
    require_positive(b, "gcd argument");
    return std::gcd(a, b);
}

Int lcm(Int a, Int b) {
    require_positive(a, "lcm argument");
    require_positive(b, "lcm argument");
    return checked_mul(a / std::gcd(a, b), b);
}

Int gcd_of(const std::vector<Int>& v) {
    if (v.empty()) throw std::invalid_argument("gcd_of: empty input");
    Int g = v[0];
    require_positive(g, "gcd argument");
    for (size_t i = 1; i < v.size(); ++i) g = gcd(g, v[i]);
    return g;
}

Int lcm_of(const std::vector<Int>& v) {
    if (v.empty()) throw std::invalid_argument("lcm_of: empty input");
    Int m = v[0];
    require_positive(m, "lcm argument");
    for (size_t i = 1; i < v.size(); ++i) m = lcm(m, v[i]);
    return m;
}

int mobius(Int k) {
    require_positive(k, "mobius argument");
    int sign = 1;
    for (auto [p, e] : factorize(k)) {
        if (e > 1) return 0;
        sign = -sign;
    }
    return sign;
}

Int totient(Int k) {
    require_positive(k, "totient argument");
    Int r = k;
    for (auto [p, e] : factorize(k)) r -= r / p;
    return r;
}

std::vector<Int> divisors(Int k) {
    require_positive(k, "divisors argument");
    return divisors_from_factors(factorize(k));
}

Int poset_mobius(Int x, Int y) {
    require_positive(x, "poset_mobius argument");
    require_positive(y, "poset_mobius argument");
    if (y % x) return 0;
    return mobius(y / x);
}

std::vector<Int> totients_up_to(Int n) {
    require_positive(n, "totients_up_to argument");
    std::vector<Int> phi(static_cast<size_t>(n) + 1);
    std::iota(phi.begin(), phi.end(), Int{0});
    for (Int p = 2; p <= n; ++p) {
        if (phi[static_cast<size_t>(p)] != p) continue; // not prime
        for (Int m = p; m <= n; m += p) phi[static_cast<size_t>(m)] -= phi[static_cast<size_t>(m)] / p;
    }
    return phi;
}

std::vector<int> mobius_up_to(Int n) {
    require_positive(n, "mobius_up_to argument");
    std::vector<int> mu(static_cast<size_t>(n) + 1, 1);
    std::vector<bool> sieved(static_cast<size_t>(n) + 1, false);
    for (Int p = 2; p <= n; ++p) {
        if (sieved[static_cast<size_t>(p)]) continue;
        for (Int m = p; m <= n; m += p) {
            sieved[static_cast<size_t>(m)] = true;
            mu[static_cast<size_t>(m)] = -mu[static_cast<size_t>(m)];
        }
        if (p <= n / p) {
            Int p2 = p * p;
            for (Int m = p2; m <= n; m += p2) mu[static_cast<size_t>(m)] = 0;
        }
    }
    return mu;
}

SpfSieve::SpfSieve(Int limit) {
    require_positive(limit, "sieve limit");
    spf_.assign(static_cast<size_t>(limit) + 1, 0);
    for (Int i = 2; i <= limit; ++i) {
        if (spf_[static_cast<size_t>(i)]) continue;
        for (Int m = i; m <= limit; m += i)
            if (!spf_[static_cast<size_t>(m)]) spf_[static_cast<size_t>(m)] = i;
    }
}

int SpfSieve::mobius(Int k) const {
    int sign = 1;
    while (k > 1) {
        Int p = spf_[static_cast<size_t>(k)];
        k /= p;
        if (k % p == 0) return 0;
        sign = -sign;
    }
    return sign;
}

Int SpfSieve::totient(Int k) const {
    Int r = k;
    while (k > 1) {
        Int p = spf_[static_cast<size_t>(k)];
        r -= r / p;
        while (k % p == 0) k /= p;
    }
    return r;
}

std::vector<Int> SpfSieve::divisors(Int k) const {
    std::vector<std::pair<Int, int>> f;
    while (k > 1) {
        Int p = spf_[static_cast<size_t>(k)];
        int e = 0;
        while (k % p == 0) { k /= p; ++e; }
        f.emplace_back(p, e);
    }
    return divisors_from_factors(f);
}

LatticeSet::LatticeSet(std::vector<Int> elements) : elems_(std::move(elements)) {
    if (elems_.empty()) throw std::invalid_argument("LatticeSet: empty set");
    for (Int v : elems_) require_positive(v, "lattice element");
    std::sort(elems_.begin(), elems_.end());
    if (std::adjacent_find(elems_.begin(), elems_.end()) != elems_.end())
        throw std::invalid_argument("LatticeSet: duplicate elements");
}

LatticeSet LatticeSet::contiguous(Int n) {
    require_positive(n, "set size");
    std::vector<Int> v(static_cast<size_t>(n));
    std::iota(v.begin(), v.end(), Int{1});
    return LatticeSet(std::move(v));
}

bool LatticeSet::contiguous_from_one() const {
    return elems_.front() == 1 && elems_.back() == static_cast<Int>(elems_.size());
}

bool LatticeSet::meet_closed() const {
    if (closed_ >= 0) return closed_ != 0;
    bool ok = true;
    if (!contiguous_from_one()) {
        std::unordered_set<Int> members(elems_.begin(), elems_.end());
        for (size_t i = 0; i < elems_.size() && ok; ++i)
            for (size_t j = i + 1; j < elems_.size(); ++j)
                if (!members.count(std::gcd(elems_[i], elems_[j]))) { ok = false; break; }
    }
    closed_ = ok ? 1 : 0;
    return ok;
}

bool IncidenceMatrix::contains(Index i, Index j) const {
    auto b = col.begin() + row_ptr[static_cast<size_t>(i)];
    auto e = col.begin() + row_ptr[static_cast<size_t>(i) + 1];
    return std::binary_search(b, e, j);
}

IncidenceMatrix incidence_matrix(const LatticeSet& s) {
    const Index n = s.size();
    IncidenceMatrix m;
    m.n = n;
    std::vector<std::vector<Index>> rows(static_cast<size_t>(n));

    // Estimate whether enumerating multiples beats the quadratic scan.
    double multiples_cost = 0;
    const double max_elem = static_cast<double>(s[n - 1]);
    for (Index j = 0; j < n; ++j) multiples_cost += max_elem / static_cast<double>(s[j]);

    if (multiples_cost < static_cast<double>(n) * static_cast<double>(n)) {
        std::unordered_map<Int, Index> pos;
        pos.reserve(static_cast<size_t>(n) * 2);
        for (Index i = 0; i < n; ++i) pos.emplace(s[i], i);
        for (Index j = 0; j < n; ++j)
            for (Int mult = s[j]; mult <= s[n - 1]; mult += s[j]) {
                auto it = pos.find(mult);
                if (it != pos.end()) rows[static_cast<size_t>(it->second)].push_back(j);
            }
        for (auto& r : rows) std::sort(r.begin(), r.end());
    } else {
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j <= i; ++j)
                if (s[i] % s[j] == 0) rows[static_cast<size_t>(i)].push_back(j);
    }

    m.row_ptr.assign(static_cast<size_t>(n) + 1, 0);
    for (Index i = 0; i < n; ++i)
        m.row_ptr[static_cast<size_t>(i) + 1] = m.row_ptr[static_cast<size_t>(i)] + static_cast<Index>(rows[static_cast<size_t>(i)].size());
    m.col.reserve(static_cast<size_t>(m.row_ptr.back()));
    for (auto& r : rows) m.col.insert(m.col.end(), r.begin(), r.end());
    return m;
}

ScalarFunction ScalarFunction::identity() {
    return {"identity", [](Int v) { return static_cast<Scalar>(v); }};
}

ScalarFunction ScalarFunction::power(double alpha) {
    char buf[48];
    auto r = std::to_chars(buf, buf + sizeof buf, alpha);
    return {"power:" + std::string(buf, r.ptr),
            [alpha](Int v) { return static_cast<Scalar>(std::pow(static_cast<double>(v), alpha)); }};
}

ScalarFunction ScalarFunction::reciprocal() {
    return {"reciprocal", [](Int v) { return Scalar{1} / static_cast<Scalar>(v); }};
}

ScalarFunction ScalarFunction::parse(const std::string& text) {
    if (text == "identity") return identity();
    if (text == "reciprocal") return reciprocal();
    if (text.rfind("power:", 0) == 0) {
        const char* b = text.c_str() + 6;
        const char* e = text.c_str() + text.size();
        double alpha = 0;
        auto r = std::from_chars(b, e, alpha);
        if (r.ec == std::errc{} && r.ptr == e) return power(alpha);
    }
    throw std::invalid_argument("unknown scalar function: " + text);
}

std::vector<Scalar> meet_coefficients(const LatticeSet& s, const ScalarFunction& f) {
    if (!s.meet_closed())
        throw std::invalid_argument("meet_coefficients: set is not meet-closed");
    const Index n = s.size();
    std::vector<Scalar> d(static_cast<size_t>(n), Scalar{0});

    if (s.contiguous_from_one()) {
        // Only z = x_k survives the "divides no earlier element" filter,
        // leaving a single Mobius inversion D_k = sum_{y | k} f(y) mu(k/y).
        SpfSieve sieve(s[n - 1]);
        for (Index k = 0; k < n; ++k) {
            Scalar acc = 0;
            for (Int y : sieve.divisors(s[k]))
                acc += f(y) * static_cast<Scalar>(sieve.mobius(s[k] / y));
            d[static_cast<size_t>(k)] = acc;
        }
        return d;
    }

    for (Index k = 0; k < n; ++k) {
        const Int xk = s[k];
        for (Int z : divisors(xk)) {
            // Skip z if some earlier (hence smaller) element is a multiple of z.
            bool earlier = false;
            for (Index j = 0; j < k; ++j)
                if (s[j] % z == 0) { earlier = true; break; }
            if (earlier) continue;
            Scalar acc = 0;
            for (Int y : divisors(z)) acc += f(y) * static_cast<Scalar>(mobius(z / y));
            d[static_cast<size_t>(k)] += acc;
        }
    }
    return d;
}

std::set<Int> coprime_products(Int n, int k) {
    require_positive(n, "coprime_products n");
    if (k < 1) throw std::invalid_argument("coprime_products: k must be >= 1");
    std::set<Int> out;
    std::vector<Int> chosen;
    // Nondecreasing factor tuples; order does not matter for the product.
    auto rec = [&](auto&& self, Int lo, int left, Int prod) -> void {
        if (left == 0) { out.insert(prod); return; }
        for (Int v = lo; v <= n; ++v) {
            bool ok = true;
            for (Int c : chosen)
                if (std::gcd(c, v) != 1) { ok = false; break; }
            if (!ok) continue;
            chosen.push_back(v);
            self(self, v, left - 1, prod * v);
            chosen.pop_back();
        }
    };
    rec(rec, 1, k, 1);
    return out;
}

Index coprime_product_count(Int n, int k) {
    return static_cast<Index>(coprime_products(n, k).size());
}

std::set<Int> lcm_value_set(Int n, int k) {
    require_positive(n, "lcm_value_set n");
    if (k < 1) throw std::invalid_argument("lcm_value_set: k must be >= 1");
    std::set<Int> out;
    auto rec = [&](auto&& self, Int lo, int left, Int acc) -> void {
        if (left == 0) { out.insert(acc); return; }
        for (Int v = lo; v <= n; ++v) self(self, v, left - 1, lcm(acc, v));
    };
    rec(rec, 1, k, 1);
    return out;
}

} // namespace ttlat::lattice
