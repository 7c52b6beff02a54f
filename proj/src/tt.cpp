#include "ttlat/tt.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ttlat::tt {

namespace {

std::string format_scalar(Scalar v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, static_cast<double>(v));
    return std::string(buf, r.ptr);
}

} // namespace

TTCore TTCore::dense(Index rows, Index dim, Index cols, std::vector<Scalar> data) {
    if (rows < 1 || dim < 1 || cols < 1) throw std::invalid_argument("TTCore: bad shape");
    if (static_cast<Index>(data.size()) != rows * dim * cols)
        throw std::invalid_argument("TTCore: data size does not match shape");
    TTCore c;
    c.sparse_ = false;
    c.rows_ = rows;
    c.dim_ = dim;
    c.cols_ = cols;
    c.data_ = std::move(data);
    return c;
}

TTCore TTCore::sparse(Index rows, Index dim, Index cols, std::vector<Entry> entries) {
    if (rows < 1 || dim < 1 || cols < 1) throw std::invalid_argument("TTCore: bad shape");
    for (const auto& e : entries)
        if (e.slice < 0 || e.slice >= dim || e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw std::invalid_argument("TTCore: entry out of range");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.slice, a.row, a.col) < std::tie(b.slice, b.row, b.col);
    });
    TTCore c;
    c.sparse_ = true;
    c.rows_ = rows;
    c.dim_ = dim;
    c.cols_ = cols;
    c.slice_ptr_.assign(static_cast<size_t>(dim) + 1, 0);
    c.row_.reserve(entries.size());
    c.col_.reserve(entries.size());
    c.val_.reserve(entries.size());
    Index last_slice = -1;
    for (const auto& e : entries) {
        if (!c.val_.empty() && e.slice == last_slice && e.row == c.row_.back() && e.col == c.col_.back()) {
            c.val_.back() += e.value; // merge duplicates
            continue;
        }
        last_slice = e.slice;
        c.row_.push_back(e.row);
        c.col_.push_back(e.col);
        c.val_.push_back(e.value);
        ++c.slice_ptr_[static_cast<size_t>(e.slice) + 1];
    }
    for (size_t i = 1; i < c.slice_ptr_.size(); ++i) c.slice_ptr_[i] += c.slice_ptr_[i - 1];
    return c;
}

Index TTCore::nnz() const {
    if (sparse_) return static_cast<Index>(val_.size());
    Index n = 0;
    for (Scalar v : data_)
        if (v != Scalar{0}) ++n;
    return n;
}

size_t TTCore::storage_bytes() const {
    if (!sparse_) return data_.size() * sizeof(Scalar);
    return slice_ptr_.size() * sizeof(Index) + row_.size() * sizeof(Index) +
           col_.size() * sizeof(Index) + val_.size() * sizeof(Scalar);
}

Matrix TTCore::slice(Index i) const {
    if (i < 0 || i >= dim_) throw std::out_of_range("TTCore::slice");
    Matrix m = Matrix::Zero(rows_, cols_);
    if (sparse_) {
        for (Index p = slice_ptr_[static_cast<size_t>(i)]; p < slice_ptr_[static_cast<size_t>(i) + 1]; ++p)
            m(row_[static_cast<size_t>(p)], col_[static_cast<size_t>(p)]) += val_[static_cast<size_t>(p)];
    } else {
        for (Index r = 0; r < rows_; ++r)
            for (Index c = 0; c < cols_; ++c)
                m(r, c) = data_[static_cast<size_t>((i * rows_ + r) * cols_ + c)];
    }
    return m;
}

void TTCore::slice_apply(Index i, const Vector& w, Vector& out) const {
    if (sparse_) {
        for (Index p = slice_ptr_[static_cast<size_t>(i)]; p < slice_ptr_[static_cast<size_t>(i) + 1]; ++p)
            out[row_[static_cast<size_t>(p)]] += val_[static_cast<size_t>(p)] * w[col_[static_cast<size_t>(p)]];
    } else {
        for (Index r = 0; r < rows_; ++r) {
            Scalar acc = 0;
            const Scalar* base = data_.data() + (i * rows_ + r) * cols_;
            for (Index c = 0; c < cols_; ++c) acc += base[c] * w[c];
            out[r] += acc;
        }
    }
}

void TTCore::slice_apply_transposed(Index i, const Vector& v, Vector& out) const {
    if (sparse_) {
        for (Index p = slice_ptr_[static_cast<size_t>(i)]; p < slice_ptr_[static_cast<size_t>(i) + 1]; ++p)
            out[col_[static_cast<size_t>(p)]] += val_[static_cast<size_t>(p)] * v[row_[static_cast<size_t>(p)]];
    } else {
        for (Index r = 0; r < rows_; ++r) {
            const Scalar* base = data_.data() + (i * rows_ + r) * cols_;
            for (Index c = 0; c < cols_; ++c) out[c] += base[c] * v[r];
        }
    }
}

void TTCore::visit(const std::function<void(Index, Index, Index, Scalar)>& fn) const {
    if (sparse_) {
        for (Index i = 0; i < dim_; ++i)
            for (Index p = slice_ptr_[static_cast<size_t>(i)]; p < slice_ptr_[static_cast<size_t>(i) + 1]; ++p)
                fn(i, row_[static_cast<size_t>(p)], col_[static_cast<size_t>(p)], val_[static_cast<size_t>(p)]);
    } else {
        for (Index i = 0; i < dim_; ++i)
            for (Index r = 0; r < rows_; ++r)
                for (Index c = 0; c < cols_; ++c) {
                    Scalar v = data_[static_cast<size_t>((i * rows_ + r) * cols_ + c)];
                    if (v != Scalar{0}) fn(i, r, c, v);
                }
    }
}

Vector TTCore::SliceSum::apply(const Vector& w) const {
    return sparse ? Vector(sp * w) : Vector(dn * w);
}

Vector TTCore::SliceSum::apply_transposed(const Vector& v) const {
    return sparse ? Vector(sp.transpose() * v) : Vector(dn.transpose() * v);
}

TTCore::SliceSum TTCore::weighted_sum(const Vector& x) const {
    if (x.size() != dim_) throw std::invalid_argument("weighted_sum: size mismatch");
    SliceSum s;
    s.sparse = sparse_;
    if (sparse_) {
        std::vector<Eigen::Triplet<Scalar>> trip;
        trip.reserve(val_.size());
        for (Index i = 0; i < dim_; ++i) {
            const Scalar xi = x[i];
            if (xi == Scalar{0}) continue;
            for (Index p = slice_ptr_[static_cast<size_t>(i)]; p < slice_ptr_[static_cast<size_t>(i) + 1]; ++p)
                trip.emplace_back(static_cast<int>(row_[static_cast<size_t>(p)]),
                                  static_cast<int>(col_[static_cast<size_t>(p)]),
                                  xi * val_[static_cast<size_t>(p)]);
        }
        s.sp.resize(rows_, cols_);
        s.sp.setFromTriplets(trip.begin(), trip.end());
    } else {
        s.dn = Matrix::Zero(rows_, cols_);
        for (Index i = 0; i < dim_; ++i) {
            const Scalar xi = x[i];
            if (xi == Scalar{0}) continue;
            Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> sl(
                data_.data() + i * rows_ * cols_, rows_, cols_);
            s.dn += xi * sl;
        }
    }
    return s;
}

TTTensor::TTTensor(std::vector<CorePtr> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw std::invalid_argument("TTTensor: no cores");
    for (const auto& c : cores_)
        if (!c) throw std::invalid_argument("TTTensor: null core");
    if (cores_.front()->rows() != 1 || cores_.back()->cols() != 1)
        throw std::invalid_argument("TTTensor: boundary ranks must be 1");
    for (size_t k = 0; k + 1 < cores_.size(); ++k)
        if (cores_[k]->cols() != cores_[k + 1]->rows())
            throw std::invalid_argument("TTTensor: rank mismatch between cores");
}

std::vector<Index> TTTensor::dims() const {
    std::vector<Index> d;
    d.reserve(cores_.size());
    for (const auto& c : cores_) d.push_back(c->dim());
    return d;
}

std::vector<Index> TTTensor::ranks() const {
    std::vector<Index> r;
    r.reserve(cores_.size() + 1);
    r.push_back(1);
    for (const auto& c : cores_) r.push_back(c->cols());
    return r;
}

Index TTTensor::max_interior_rank() const {
    Index m = 1;
    for (size_t k = 0; k + 1 < cores_.size(); ++k) m = std::max(m, cores_[k]->cols());
    return m;
}

Scalar TTTensor::element(const std::vector<Index>& idx) const {
    if (static_cast<Index>(idx.size()) != order())
        throw std::invalid_argument("element: index order mismatch");
    Vector v = Vector::Ones(1);
    for (size_t k = 0; k < cores_.size(); ++k) {
        const TTCore& c = *cores_[k];
        if (idx[k] < 0 || idx[k] >= c.dim()) throw std::out_of_range("element: index out of range");
        Vector next = Vector::Zero(c.cols());
        c.slice_apply_transposed(idx[k], v, next);
        v.swap(next);
    }
    return v[0];
}

size_t TTTensor::storage_bytes() const {
    std::unordered_set<const TTCore*> seen;
    size_t total = 0;
    for (const auto& c : cores_)
        if (seen.insert(c.get()).second) total += c->storage_bytes();
    return total;
}

namespace {

using SumCache = std::unordered_map<const TTCore*, TTCore::SliceSum>;

const TTCore::SliceSum& cached_sum(SumCache& cache, const TTCore& core, const Vector& x) {
    auto it = cache.find(&core);
    if (it == cache.end()) it = cache.emplace(&core, core.weighted_sum(x)).first;
    return it->second;
}

void check_square(const TTTensor& t, const Vector& x, Index from_mode) {
    for (Index k = from_mode; k < t.order(); ++k)
        if (t.core(k).dim() != x.size())
            throw std::invalid_argument("contraction: x size does not match mode size");
}

} // namespace

Scalar contract_scalar(const TTTensor& t, const Vector& x) {
    check_square(t, x, 0);
    SumCache cache;
    Vector v = Vector::Ones(1);
    for (Index k = 0; k < t.order(); ++k)
        v = cached_sum(cache, t.core(k), x).apply_transposed(v);
    return v[0];
}

Vector contract_vector(const TTTensor& t, const Vector& x) {
    check_square(t, x, 1);
    SumCache cache;
    Vector w = Vector::Ones(1);
    for (Index k = t.order() - 1; k >= 1; --k)
        w = cached_sum(cache, t.core(k), x).apply(w);
    const TTCore& first = t.core(0);
    Vector out = Vector::Zero(first.dim());
    Vector tmp = Vector::Zero(1);
    for (Index i = 0; i < first.dim(); ++i) {
        tmp[0] = 0;
        // first core has a single row, so G_1(i) * w is a scalar
        first.slice_apply(i, w, tmp);
        out[i] = tmp[0];
    }
    return out;
}

Matrix contract_matrix(const TTTensor& t, const Vector& x) {
    if (t.order() < 2) throw std::invalid_argument("contract_matrix: order must be >= 2");
    check_square(t, x, 2);
    SumCache cache;
    Vector w = Vector::Ones(1);
    for (Index k = t.order() - 1; k >= 2; --k)
        w = cached_sum(cache, t.core(k), x).apply(w);

    const TTCore& second = t.core(1);
    const Index n2 = second.dim();
    Matrix u = Matrix::Zero(second.rows(), n2); // column i2 = G_2(i2) * w
    Vector col = Vector::Zero(second.rows());
    for (Index i = 0; i < n2; ++i) {
        col.setZero();
        second.slice_apply(i, w, col);
        u.col(i) = col;
    }

    const TTCore& first = t.core(0);
    Matrix out = Matrix::Zero(first.dim(), n2);
    first.visit([&](Index i, Index, Index c, Scalar v) { out.row(i) += v * u.row(c); });
    return out;
}

TTTensor contract_mode(const TTTensor& t, Index k, const Vector& x) {
    if (k < 0 || k >= t.order()) throw std::out_of_range("contract_mode");
    if (t.core(k).dim() != x.size()) throw std::invalid_argument("contract_mode: size mismatch");
    auto sum = t.core(k).weighted_sum(x);
    std::vector<TTCore::Entry> entries;
    Matrix m = sum.sparse ? Matrix(sum.sp) : sum.dn;
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c)
            if (m(r, c) != Scalar{0}) entries.push_back({0, r, c, m(r, c)});
    auto replaced = std::make_shared<TTCore>(TTCore::sparse(m.rows(), 1, m.cols(), std::move(entries)));
    std::vector<CorePtr> cores;
    for (Index j = 0; j < t.order(); ++j) cores.push_back(j == k ? replaced : t.core_ptr(j));
    return TTTensor(std::move(cores));
}

TTTensor meet_tt(const lattice::LatticeSet& s, const lattice::ScalarFunction& f, Index d) {
    if (d < 2) throw std::invalid_argument("meet_tt: order must be >= 2");
    if (!s.meet_closed()) throw std::invalid_argument("meet_tt: set is not meet-closed");
    const Index n = s.size();
    auto inc = lattice::incidence_matrix(s);
    auto coef = lattice::meet_coefficients(s, f);

    std::vector<TTCore::Entry> first, middle, last;
    first.reserve(static_cast<size_t>(inc.nnz()));
    middle.reserve(static_cast<size_t>(inc.nnz()));
    last.reserve(static_cast<size_t>(inc.nnz()));
    for (Index i = 0; i < n; ++i)
        for (Index p = inc.row_ptr[static_cast<size_t>(i)]; p < inc.row_ptr[static_cast<size_t>(i) + 1]; ++p) {
            Index j = inc.col[static_cast<size_t>(p)];
            first.push_back({i, 0, j, coef[static_cast<size_t>(j)]});
            middle.push_back({i, j, j, Scalar{1}});
            last.push_back({i, j, 0, Scalar{1}});
        }

    auto g1 = std::make_shared<TTCore>(TTCore::sparse(1, n, n, std::move(first)));
    auto gd = std::make_shared<TTCore>(TTCore::sparse(n, n, 1, std::move(last)));
    std::vector<CorePtr> cores;
    cores.reserve(static_cast<size_t>(d));
    cores.push_back(g1);
    if (d > 2) {
        auto gm = std::make_shared<TTCore>(TTCore::sparse(n, n, n, std::move(middle)));
        for (Index k = 1; k < d - 1; ++k) cores.push_back(gm); // aliased
    }
    cores.push_back(gd);
    return TTTensor(std::move(cores));
}

TTTensor smith_tt(Int n, Index d) {
    return meet_tt(lattice::LatticeSet::contiguous(n), lattice::ScalarFunction::identity(), d);
}

DenseTensor DenseTensor::zeros(std::vector<Index> dims) {
    DenseTensor t;
    Index total = 1;
    for (Index d : dims) {
        if (d < 1) throw std::invalid_argument("DenseTensor: bad dims");
        total *= d;
    }
    t.dims = std::move(dims);
    t.values.assign(static_cast<size_t>(total), Scalar{0});
    return t;
}

namespace {
Index flat_index(const std::vector<Index>& dims, const std::vector<Index>& idx) {
    Index f = 0;
    for (size_t k = 0; k < dims.size(); ++k) f = f * dims[k] + idx[k];
    return f;
}
} // namespace

Scalar& DenseTensor::at(const std::vector<Index>& idx) {
    return values[static_cast<size_t>(flat_index(dims, idx))];
}

Scalar DenseTensor::at(const std::vector<Index>& idx) const {
    return values[static_cast<size_t>(flat_index(dims, idx))];
}

bool next_index(std::vector<Index>& idx, const std::vector<Index>& dims) {
    for (size_t k = dims.size(); k-- > 0;) {
        if (++idx[k] < dims[k]) return true;
        idx[k] = 0;
    }
    return false;
}

DenseTensor to_dense(const TTTensor& t, Index cap) {
    auto dims = t.dims();
    Index total = 1;
    for (Index d : dims) {
        if (total > cap / d) throw std::length_error("to_dense: element cap exceeded");
        total *= d;
    }
    DenseTensor out = DenseTensor::zeros(dims);
    std::vector<Index> idx(dims.size(), 0);
    Index f = 0;
    do {
        out.values[static_cast<size_t>(f++)] = t.element(idx);
    } while (next_index(idx, dims));
    return out;
}

Index unfolding_rank(const DenseTensor& a, Index k, double tol) {
    const Index d = a.order();
    if (k < 1 || k >= d) throw std::invalid_argument("unfolding_rank: k out of range");
    Index rows = 1, cols = 1;
    for (Index i = 0; i < k; ++i) rows *= a.dims[static_cast<size_t>(i)];
    for (Index i = k; i < d; ++i) cols *= a.dims[static_cast<size_t>(i)];
    Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        a.values.data(), rows, cols);
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == Scalar{0}) return 0;
    Index r = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol * sv[0]) ++r;
    return r;
}

Index max_tt_rank(const DenseTensor& a, double tol) {
    Index m = 0;
    for (Index k = 1; k < a.order(); ++k) m = std::max(m, unfolding_rank(a, k, tol));
    return m;
}

void write_tt(std::ostream& os, const TTTensor& t) {
    auto dims = t.dims();
    for (Index d : dims)
        if (d != dims[0]) throw std::invalid_argument("write_tt: modes must have equal size");
    os << "tt " << t.order() << ' ' << dims[0];
    for (Index r : t.ranks()) os << ' ' << r;
    os << '\n';
    for (Index k = 0; k < t.order(); ++k)
        t.core(k).visit([&](Index i, Index r, Index c, Scalar v) {
            os << k << ' ' << i << ' ' << r << ' ' << c << ' ' << format_scalar(v) << '\n';
        });
}

TTTensor read_tt(std::istream& is) {
    std::string tag;
    Index d = 0, n = 0;
    if (!(is >> tag >> d >> n) || tag != "tt" || d < 1 || n < 1)
        throw std::runtime_error("read_tt: bad header");
    std::vector<Index> ranks(static_cast<size_t>(d) + 1);
    for (auto& r : ranks)
        if (!(is >> r) || r < 1) throw std::runtime_error("read_tt: bad ranks");
    if (ranks.front() != 1 || ranks.back() != 1) throw std::runtime_error("read_tt: boundary ranks");

    std::vector<std::vector<TTCore::Entry>> entries(static_cast<size_t>(d));
    Index k, i, r, c;
    std::string valtext;
    while (is >> k >> i >> r >> c >> valtext) {
        if (k < 0 || k >= d) throw std::runtime_error("read_tt: core index out of range");
        double v = 0;
        auto res = std::from_chars(valtext.data(), valtext.data() + valtext.size(), v);
        if (res.ec != std::errc{} || res.ptr != valtext.data() + valtext.size())
            throw std::runtime_error("read_tt: bad value");
        entries[static_cast<size_t>(k)].push_back({i, r, c, static_cast<Scalar>(v)});
    }
    std::vector<CorePtr> cores;
    cores.reserve(static_cast<size_t>(d));
    for (Index kk = 0; kk < d; ++kk)
        cores.push_back(std::make_shared<TTCore>(TTCore::sparse(
            ranks[static_cast<size_t>(kk)], n, ranks[static_cast<size_t>(kk) + 1],
            std::move(entries[static_cast<size_t>(kk)]))));
    return TTTensor(std::move(cores));
}

void save_tt(const std::string& path, const TTTensor& t) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_tt: cannot open " + path);
    write_tt(os, t);
    if (!os.good()) throw std::runtime_error("save_tt: write failed for " + path);
}

TTTensor load_tt(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_tt: cannot open " + path);
    return read_tt(is);
}

} // namespace ttlat::tt
