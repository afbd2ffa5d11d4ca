#include "scf/galois.hpp"

#include <fstream>
#include <sstream>

namespace scf::galois {

bool is_prime(std::uint32_t q) {
    if (q < 2) return false;
    for (std::uint32_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

namespace {

void require_prime(std::uint32_t q) {
    if (!is_prime(q)) throw Error("modulus " + std::to_string(q) + " is not prime");
}

void require_same_modulus(std::uint32_t a, std::uint32_t b) {
    if (a != b)
        throw Error("modulus mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

FieldScalar::FieldScalar(std::uint32_t v, std::uint32_t q) : value(v), modulus(q) {
    require_prime(q);
    if (v >= q) throw Error("field value out of range");
}

FieldScalar add(FieldScalar a, FieldScalar b) {
    require_same_modulus(a.modulus, b.modulus);
    return {mod_add(a.value, b.value, a.modulus), a.modulus};
}

FieldScalar sub(FieldScalar a, FieldScalar b) {
    require_same_modulus(a.modulus, b.modulus);
    return {mod_sub(a.value, b.value, a.modulus), a.modulus};
}

FieldScalar mul(FieldScalar a, FieldScalar b) {
    require_same_modulus(a.modulus, b.modulus);
    return {mod_mul(a.value, b.value, a.modulus), a.modulus};
}

std::uint32_t mod_inv(std::uint32_t a, std::uint32_t q) {
    if (a == 0) throw Error("inverse of zero");
    // Fermat: a^(q-2) mod q.
    std::uint64_t base = a % q, acc = 1;
    std::uint32_t e = q - 2;
    while (e > 0) {
        if (e & 1u) acc = acc * base % q;
        base = base * base % q;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(acc);
}

FieldScalar inv(FieldScalar a) { return {mod_inv(a.value, a.modulus), a.modulus}; }

FieldScalar field_arith(FieldScalar a, FieldScalar b, FieldOp op) {
    switch (op) {
        case FieldOp::add: return add(a, b);
        case FieldOp::sub: return sub(a, b);
        case FieldOp::mul: return mul(a, b);
        case FieldOp::inv: return inv(a);
    }
    throw Error("unknown field operation");
}

bool operator==(FieldScalar a, FieldScalar b) {
    return a.value == b.value && a.modulus == b.modulus;
}

FieldVector::FieldVector(std::uint32_t q, std::size_t len) : q_(q), v_(len, 0) {
    require_prime(q);
}

FieldVector::FieldVector(std::uint32_t q, std::vector<std::uint32_t> entries)
    : q_(q), v_(std::move(entries)) {
    require_prime(q);
    for (auto e : v_)
        if (e >= q) throw Error("field value out of range");
}

void FieldVector::set(std::size_t i, std::uint32_t value) {
    if (value >= q_) throw Error("field value out of range");
    v_[i] = value;
}

bool FieldVector::is_zero() const {
    for (auto e : v_)
        if (e != 0) return false;
    return true;
}

FieldVector FieldVector::operator+(const FieldVector& o) const {
    require_same_modulus(q_, o.q_);
    if (size() != o.size()) throw Error("vector length mismatch");
    FieldVector r(q_, size());
    for (std::size_t i = 0; i < size(); ++i) r.v_[i] = mod_add(v_[i], o.v_[i], q_);
    return r;
}

FieldVector FieldVector::operator-(const FieldVector& o) const {
    require_same_modulus(q_, o.q_);
    if (size() != o.size()) throw Error("vector length mismatch");
    FieldVector r(q_, size());
    for (std::size_t i = 0; i < size(); ++i) r.v_[i] = mod_sub(v_[i], o.v_[i], q_);
    return r;
}

bool FieldVector::operator<(const FieldVector& o) const {
    return v_ < o.v_;
}

FieldMatrix::FieldMatrix(std::uint32_t q, std::size_t rows, std::size_t cols)
    : q_(q), rows_(rows), cols_(cols), a_(rows * cols, 0) {
    require_prime(q);
}

FieldMatrix FieldMatrix::identity(std::uint32_t q, std::size_t n) {
    FieldMatrix m(q, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

void FieldMatrix::set(std::size_t r, std::size_t c, std::uint32_t value) {
    if (value >= q_) throw Error("field value out of range");
    a_[r * cols_ + c] = value;
}

FieldMatrix FieldMatrix::operator*(const FieldMatrix& o) const {
    require_same_modulus(q_, o.q_);
    if (cols_ != o.rows_) throw Error("matrix dimension mismatch");
    FieldMatrix r(q_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            std::uint32_t aik = at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                r.a_[i * o.cols_ + j] =
                    mod_add(r.a_[i * o.cols_ + j], mod_mul(aik, o.at(k, j), q_), q_);
        }
    return r;
}

FieldVector FieldMatrix::operator*(const FieldVector& v) const {
    require_same_modulus(q_, v.q());
    if (cols_ != v.size()) throw Error("matrix/vector dimension mismatch");
    FieldVector r(q_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::uint32_t acc = 0;
        for (std::size_t j = 0; j < cols_; ++j)
            acc = mod_add(acc, mod_mul(at(i, j), v[j], q_), q_);
        r.set(i, acc);
    }
    return r;
}

FieldMatrix FieldMatrix::operator+(const FieldMatrix& o) const {
    require_same_modulus(q_, o.q_);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix dimension mismatch");
    FieldMatrix r(q_, rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = mod_add(a_[i], o.a_[i], q_);
    return r;
}

FieldMatrix FieldMatrix::transposed() const {
    FieldMatrix r(q_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r.set(j, i, at(i, j));
    return r;
}

bool FieldMatrix::is_zero() const {
    for (auto e : a_)
        if (e != 0) return false;
    return true;
}

FieldMatrix FieldMatrix::permute_rows(const std::vector<std::size_t>& perm) const {
    if (perm.size() != rows_) throw Error("permutation length mismatch");
    FieldMatrix r(q_, rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r.set(i, j, at(perm[i], j));
    return r;
}

namespace {

// Row echelon of a working copy; returns pivot column list. Optionally
// reduces an attached augmented column in lockstep.
struct Echelon {
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::size_t> pivot_cols;
};

Echelon echelon_form(const FieldMatrix& m) {
    std::uint32_t q = m.q();
    Echelon e;
    e.rows.resize(m.rows(), std::vector<std::uint32_t>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e.rows[i][j] = m.at(i, j);

    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t piv = r;
        while (piv < m.rows() && e.rows[piv][c] == 0) ++piv;
        if (piv == m.rows()) continue;
        std::swap(e.rows[r], e.rows[piv]);
        std::uint32_t invp = mod_inv(e.rows[r][c], q);
        for (std::size_t j = c; j < m.cols(); ++j)
            e.rows[r][j] = mod_mul(e.rows[r][j], invp, q);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || e.rows[i][c] == 0) continue;
            std::uint32_t f = e.rows[i][c];
            for (std::size_t j = c; j < m.cols(); ++j)
                e.rows[i][j] = mod_sub(e.rows[i][j], mod_mul(f, e.rows[r][j], q), q);
        }
        e.pivot_cols.push_back(c);
        ++r;
    }
    return e;
}

}  // namespace

std::size_t rank(const FieldMatrix& m) { return echelon_form(m).pivot_cols.size(); }

std::optional<FieldVector> solve_membership(const FieldMatrix& m, const FieldVector& x) {
    if (x.size() != m.rows()) throw Error("right-hand side length mismatch");
    if (x.q() != m.q()) throw Error("modulus mismatch");
    std::uint32_t q = m.q();

    // Eliminate on [m | x].
    FieldMatrix aug(q, m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.set(i, j, m.at(i, j));
        aug.set(i, m.cols(), x[i]);
    }
    Echelon e = echelon_form(aug);

    FieldVector v(q, m.cols());
    std::size_t row = 0;
    for (std::size_t c : e.pivot_cols) {
        if (c == m.cols()) return std::nullopt;  // pivot in the augmented column
        v.set(c, e.rows[row][m.cols()]);
        ++row;
    }
    // Free variables stay 0; verify (non-pivot structure can be inconsistent
    // only via an augmented pivot, already handled, so this is a cross-check).
    if (!(m * v == x)) return std::nullopt;
    return v;
}

std::vector<std::size_t> independent_rows(const FieldMatrix& m) {
    // Pivot columns of the transpose = independent rows of m.
    return echelon_form(m.transposed()).pivot_cols;
}

std::string to_text(const FieldMatrix& m) {
    std::ostringstream os;
    os << m.q() << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m.at(i, j);
        }
        os << '\n';
    }
    return os.str();
}

FieldMatrix parse_matrix(std::istream& in) {
    std::uint32_t q;
    std::size_t rows, cols;
    if (!(in >> q >> rows >> cols)) throw Error("matrix header parse failure");
    FieldMatrix m(q, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            std::uint32_t v;
            if (!(in >> v)) throw Error("matrix entry parse failure");
            m.set(i, j, v);
        }
    return m;
}

FieldMatrix parse_matrix_text(const std::string& text) {
    std::istringstream is(text);
    return parse_matrix(is);
}

FieldMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix file: " + path);
    return parse_matrix(in);
}

}  // namespace scf::galois
