#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ttlat/oracle.hpp"
#include "ttlat/tt.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace ttlat;
using namespace ttlat::tt;
using lattice::LatticeSet;
using lattice::ScalarFunction;

namespace {

TTTensor random_tt(const std::vector<Index>& dims, const std::vector<Index>& ranks,
                   std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<CorePtr> cores;
    for (size_t k = 0; k < dims.size(); ++k) {
        Index r0 = ranks[k], n = dims[k], r1 = ranks[k + 1];
        std::vector<Scalar> data(static_cast<size_t>(r0 * n * r1));
        for (auto& v : data) v = static_cast<Scalar>(u(rng));
        cores.push_back(std::make_shared<TTCore>(TTCore::dense(r0, n, r1, std::move(data))));
    }
    return TTTensor(std::move(cores));
}

Vector random_vec(Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = static_cast<Scalar>(u(rng));
    return x;
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

} // namespace

TEST_CASE("core construction and slices") {
    // 2x2x2 sparse core with two entries
    auto c = TTCore::sparse(2, 2, 2, {{0, 0, 1, 3.0}, {1, 1, 0, -2.0}});
    CHECK(c.nnz() == 2);
    Matrix s0 = c.slice(0);
    CHECK(s0(0, 1) == 3.0);
    CHECK(s0(0, 0) == 0.0);
    Matrix s1 = c.slice(1);
    CHECK(s1(1, 0) == -2.0);

    auto d = TTCore::dense(1, 2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK(d.slice(0)(0, 0) == 1.0);
    CHECK(d.slice(0)(0, 1) == 2.0);
    CHECK(d.slice(1)(0, 0) == 3.0);
    CHECK(d.nnz() == 4);

    CHECK_THROWS_AS(TTCore::sparse(2, 2, 2, {{0, 5, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TTCore::dense(2, 2, 2, {1.0}), std::invalid_argument);
}

TEST_CASE("duplicate sparse entries merge") {
    auto c = TTCore::sparse(1, 1, 1, {{0, 0, 0, 2.0}, {0, 0, 0, 3.0}});
    CHECK(c.nnz() == 1);
    CHECK(c.slice(0)(0, 0) == 5.0);
}

TEST_CASE("train validation") {
    auto a = std::make_shared<TTCore>(TTCore::dense(1, 2, 3, std::vector<Scalar>(6, 1.0)));
    auto b = std::make_shared<TTCore>(TTCore::dense(3, 2, 1, std::vector<Scalar>(6, 1.0)));
    CHECK_NOTHROW(TTTensor({a, b}));
    CHECK_THROWS_AS(TTTensor({a, a}), std::invalid_argument); // rank mismatch / boundary
    CHECK_THROWS_AS(TTTensor({b}), std::invalid_argument);
    CHECK_THROWS_AS(TTTensor({}), std::invalid_argument);
}

TEST_CASE("element of the gcd train") {
    auto t = smith_tt(6, 3);
    CHECK(t.element({1, 3, 5}) == 2.0); // gcd(2, 4, 6)
    CHECK(t.element({0, 0, 0}) == 1.0);
    CHECK(t.element({5, 5, 5}) == 6.0);
    CHECK(t.element({4, 2, 1}) == 1.0); // gcd(5, 3, 2)
}

TEST_CASE("meet train matches dense meet exactly") {
    std::vector<std::vector<Int>> sets = {{1, 2, 3, 4, 5, 6}, {2, 4, 6}, {3, 6, 9, 18}, {1, 7, 11}};
    auto id = ScalarFunction::identity();
    auto sq = ScalarFunction::power(2.0);
    auto rec = ScalarFunction::reciprocal();
    for (const auto& elems : sets) {
        LatticeSet s(elems);
        for (Index d = 2; d <= 4; ++d) {
            for (const auto* f : {&id, &sq}) {
                auto t = meet_tt(s, *f, d);
                auto ref = oracle::dense_meet(s, *f, d);
                auto got = to_dense(t);
                REQUIRE(got.values.size() == ref.values.size());
                for (size_t i = 0; i < ref.values.size(); ++i)
                    CHECK(got.values[i] == ref.values[i]); // integer data: exact
            }
            auto t = meet_tt(s, rec, d);
            auto ref = oracle::dense_meet(s, rec, d);
            auto got = to_dense(t);
            for (size_t i = 0; i < ref.values.size(); ++i)
                CHECK(rel_err(static_cast<double>(got.values[i]), static_cast<double>(ref.values[i])) < 1e-12);
        }
    }
}

TEST_CASE("meet train rejects non-closed sets and tiny orders") {
    CHECK_THROWS_AS(meet_tt(LatticeSet({4, 6}), ScalarFunction::identity(), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(meet_tt(LatticeSet({1, 2}), ScalarFunction::identity(), 1),
                    std::invalid_argument);
}

TEST_CASE("meet train nonzero counts follow the divisor summatory function") {
    for (auto [n, expect] : std::vector<std::pair<Int, Index>>{{10, 27}, {100, 482}}) {
        auto t = smith_tt(n, 3);
        CHECK(t.core(0).nnz() == expect);
        CHECK(t.core(1).nnz() == expect);
        CHECK(t.core(2).nnz() == expect);
    }
}

TEST_CASE("middle cores are aliased and storage is order-independent") {
    auto t4 = smith_tt(30, 4);
    auto t400 = smith_tt(30, 400);
    CHECK(t4.core_ptr(1).get() == t4.core_ptr(2).get());
    for (Index k = 2; k < 399; ++k) CHECK(t400.core_ptr(k).get() == t400.core_ptr(1).get());
    CHECK(t4.storage_bytes() == t400.storage_bytes());
    CHECK(t400.element(std::vector<Index>(400, 23)) == 24.0);
}

TEST_CASE("contractions on the 2x2 gcd matrix") {
    auto t = smith_tt(2, 2);
    Vector x(2);
    x << 1.0, 1.0;
    CHECK(contract_scalar(t, x) == 5.0);
    Vector v = contract_vector(t, x);
    CHECK(v[0] == 2.0);
    CHECK(v[1] == 3.0);
    Matrix m = contract_matrix(t, x);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == 1.0);
    CHECK(m(1, 1) == 2.0);
}

TEST_CASE("contraction kernels match dense references") {
    std::mt19937_64 rng(17);
    auto id = ScalarFunction::identity();
    for (Int n : {Int{2}, Int{4}, Int{6}}) {
        for (Index d = 2; d <= 5; ++d) {
            auto t = meet_tt(LatticeSet::contiguous(n), id, d);
            auto dense = to_dense(t);
            for (int rep = 0; rep < 25; ++rep) {
                Vector x = random_vec(n, rng);
                Scalar s_tt = contract_scalar(t, x);
                Scalar s_ref = oracle::dense_contract(dense, x, d).values[0];
                CHECK(rel_err(static_cast<double>(s_tt), static_cast<double>(s_ref)) < 1e-12);

                Vector v_tt = contract_vector(t, x);
                auto v_ref = oracle::dense_contract(dense, x, d - 1);
                for (Index i = 0; i < n; ++i)
                    CHECK(rel_err(static_cast<double>(v_tt[i]), static_cast<double>(v_ref.values[static_cast<size_t>(i)])) < 1e-12);

                Matrix m_tt = contract_matrix(t, x);
                auto m_ref = oracle::dense_contract(dense, x, d - 2);
                for (Index i = 0; i < n; ++i)
                    for (Index j = 0; j < n; ++j)
                        CHECK(rel_err(static_cast<double>(m_tt(i, j)),
                                      static_cast<double>(m_ref.values[static_cast<size_t>(i * n + j)])) < 1e-12);
            }
        }
    }
}

TEST_CASE("contractions of random dense trains match brute force") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Index> dims{3, 3, 3, 3};
        std::vector<Index> ranks{1, 2, 3, 2, 1};
        auto t = random_tt(dims, ranks, rng);
        auto dense = to_dense(t);
        Vector x = random_vec(3, rng);
        CHECK(rel_err(static_cast<double>(contract_scalar(t, x)),
                      static_cast<double>(oracle::dense_contract(dense, x, 4).values[0])) < 1e-12);
        Vector v = contract_vector(t, x);
        auto vr = oracle::dense_contract(dense, x, 3);
        for (Index i = 0; i < 3; ++i)
            CHECK(rel_err(static_cast<double>(v[i]), static_cast<double>(vr.values[static_cast<size_t>(i)])) < 1e-12);
    }
}

TEST_CASE("mode-k contraction matches the dense definition") {
    std::mt19937_64 rng(5);
    std::vector<Index> dims{3, 4, 2, 3};
    std::vector<Index> ranks{1, 2, 2, 2, 1};
    auto t = random_tt(dims, ranks, rng);
    auto dense = to_dense(t);
    for (Index k = 0; k < 4; ++k) {
        Vector x = random_vec(dims[static_cast<size_t>(k)], rng);
        auto tc = contract_mode(t, k, x);
        CHECK(tc.core(k).dim() == 1);
        auto got = to_dense(tc); // mode k has size 1
        auto ref = oracle::dense_contract_mode(dense, k, x);
        REQUIRE(got.values.size() == ref.values.size());
        for (size_t i = 0; i < ref.values.size(); ++i)
            CHECK(rel_err(static_cast<double>(got.values[i]), static_cast<double>(ref.values[i])) < 1e-12);
    }
}

TEST_CASE("dense conversion respects the cap") {
    auto t = smith_tt(10, 8);
    CHECK_THROWS_AS(to_dense(t), std::length_error);
    CHECK_NOTHROW(to_dense(smith_tt(4, 4)));
}

TEST_CASE("unfolding ranks") {
    auto id = ScalarFunction::identity();
    // gcd matrix is full rank
    auto g4 = oracle::dense_meet(LatticeSet::contiguous(4), id, 2);
    CHECK(unfolding_rank(g4, 1) == 4);
    CHECK(max_tt_rank(g4) == 4);

    // order-3 gcd tensor over {1..4}: every unfolding has rank 4
    auto g43 = oracle::dense_meet(LatticeSet::contiguous(4), id, 3);
    CHECK(unfolding_rank(g43, 1) == 4);
    CHECK(unfolding_rank(g43, 2) == 4);

    // lcm tensors: n=5 d=4 peaks at 10, n=2 d=3 stays at 2
    auto l54 = oracle::dense_join(LatticeSet::contiguous(5), id, 4);
    CHECK(max_tt_rank(l54) == 10);
    auto l23 = oracle::dense_join(LatticeSet::contiguous(2), id, 3);
    CHECK(unfolding_rank(l23, 1) == 2);
    CHECK(unfolding_rank(l23, 2) == 2);

    CHECK_THROWS_AS(unfolding_rank(g4, 0), std::invalid_argument);
    CHECK_THROWS_AS(unfolding_rank(g4, 2), std::invalid_argument);

    auto z = DenseTensor::zeros({3, 3});
    CHECK(unfolding_rank(z, 1) == 0);
}

TEST_CASE("serialization round-trips exactly") {
    auto t = smith_tt(6, 3);
    std::stringstream ss;
    write_tt(ss, t);
    auto u = read_tt(ss);
    CHECK(u.order() == 3);
    CHECK(u.ranks() == t.ranks());
    std::vector<Index> idx(3, 0);
    auto dims = t.dims();
    do {
        CHECK(u.element(idx) == t.element(idx));
    } while (next_index(idx, dims));
}

TEST_CASE("serialization round-trips random dense cores") {
    std::mt19937_64 rng(123);
    auto t = random_tt({3, 3, 3}, {1, 3, 2, 1}, rng);
    std::stringstream ss;
    write_tt(ss, t);
    std::string text = ss.str();
    CHECK(text.rfind("tt 3 3 1 3 2 1\n", 0) == 0);
    std::stringstream in(text);
    auto u = read_tt(in);
    std::vector<Index> idx(3, 0);
    auto dims = t.dims();
    do {
        CHECK(u.element(idx) == t.element(idx)); // shortest round-trip decimals
    } while (next_index(idx, dims));
}

TEST_CASE("serialization rejects malformed input") {
    std::stringstream a("nope 2 2 1 2 1\n");
    CHECK_THROWS_AS(read_tt(a), std::runtime_error);
    std::stringstream b("tt 2 2 1 2 2\n");
    CHECK_THROWS_AS(read_tt(b), std::runtime_error);
    std::stringstream c("tt 2 2 1 2 1\n5 0 0 0 1.0\n");
    CHECK_THROWS_AS(read_tt(c), std::runtime_error);
}

TEST_CASE("weighted slice sums agree with explicit slices") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<TTCore::Entry> entries;
    for (int i = 0; i < 40; ++i)
        entries.push_back({static_cast<Index>(i % 5), static_cast<Index>(i % 3),
                           static_cast<Index>(i % 4), static_cast<Scalar>(u(rng))});
    auto c = TTCore::sparse(3, 5, 4, entries);
    Vector x = random_vec(5, rng);
    auto sum = c.weighted_sum(x);
    Matrix ref = Matrix::Zero(3, 4);
    for (Index i = 0; i < 5; ++i) ref += x[i] * c.slice(i);
    Vector w = random_vec(4, rng);
    Vector lhs = sum.apply(w);
    Vector rhs = ref * w;
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-13);
    Vector v = random_vec(3, rng);
    Vector lt = sum.apply_transposed(v);
    Vector rt = ref.transpose() * v;
    for (Index i = 0; i < 4; ++i) CHECK(std::abs(lt[i] - rt[i]) < 1e-13);
}

TEST_CASE("rank-one train") {
    // element = u_{i1} u_{i2} u_{i3}
    Vector u(3);
    u << 0.5, 1.5, -2.0;
    std::vector<Scalar> data(u.data(), u.data() + 3);
    auto c = std::make_shared<TTCore>(TTCore::dense(1, 3, 1, data));
    TTTensor t({c, c, c});
    CHECK(t.element({0, 1, 2}) == doctest::Approx(0.5 * 1.5 * -2.0));
    CHECK(t.max_interior_rank() == 1);
}
