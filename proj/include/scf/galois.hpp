#ifndef SCF_GALOIS_HPP
#define SCF_GALOIS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scf/common.hpp"

namespace scf::galois {

bool is_prime(std::uint32_t q);

// Element of the prime field F_q. Carries its modulus so that mixed-modulus
// arithmetic can be rejected at runtime.
struct FieldScalar {
    std::uint32_t value = 0;
    std::uint32_t modulus = 2;

    FieldScalar() = default;
    FieldScalar(std::uint32_t v, std::uint32_t q);
};

FieldScalar add(FieldScalar a, FieldScalar b);
FieldScalar sub(FieldScalar a, FieldScalar b);
FieldScalar mul(FieldScalar a, FieldScalar b);
FieldScalar inv(FieldScalar a);  // a != 0

enum class FieldOp { add, sub, mul, inv };
FieldScalar field_arith(FieldScalar a, FieldScalar b, FieldOp op);

bool operator==(FieldScalar a, FieldScalar b);

// Modular helpers on raw residues (q prime, operands already reduced).
inline std::uint32_t mod_add(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    std::uint32_t s = a + b;
    return s >= q ? s - q : s;
}
inline std::uint32_t mod_sub(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    return a >= b ? a - b : a + q - b;
}
inline std::uint32_t mod_mul(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % q);
}
std::uint32_t mod_inv(std::uint32_t a, std::uint32_t q);

// Vector over F_q. All entries share the vector's modulus.
class FieldVector {
  public:
    FieldVector() = default;
    FieldVector(std::uint32_t q, std::size_t len);
    FieldVector(std::uint32_t q, std::vector<std::uint32_t> entries);
    FieldVector(std::uint32_t q, std::initializer_list<std::uint32_t> entries)
        : FieldVector(q, std::vector<std::uint32_t>(entries)) {}

    std::uint32_t q() const { return q_; }
    std::size_t size() const { return v_.size(); }
    std::uint32_t operator[](std::size_t i) const { return v_[i]; }
    void set(std::size_t i, std::uint32_t value);
    const std::vector<std::uint32_t>& entries() const { return v_; }

    bool is_zero() const;
    FieldVector operator+(const FieldVector& o) const;
    FieldVector operator-(const FieldVector& o) const;
    bool operator==(const FieldVector& o) const = default;
    bool operator<(const FieldVector& o) const;

  private:
    std::uint32_t q_ = 2;
    std::vector<std::uint32_t> v_;
};

// Dense row-major matrix over F_q. Zero-dimensional shapes are allowed so
// degenerate hash splits (kbar = 0 or kbar = k) stay representable.
class FieldMatrix {
  public:
    FieldMatrix() = default;
    FieldMatrix(std::uint32_t q, std::size_t rows, std::size_t cols);
    static FieldMatrix identity(std::uint32_t q, std::size_t n);

    std::uint32_t q() const { return q_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint32_t at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, std::uint32_t value);

    FieldMatrix operator*(const FieldMatrix& o) const;
    FieldVector operator*(const FieldVector& v) const;
    FieldMatrix operator+(const FieldMatrix& o) const;
    bool operator==(const FieldMatrix& o) const = default;

    FieldMatrix transposed() const;
    bool is_zero() const;

    // Rows/columns rearrangement (perm[i] = source index).
    FieldMatrix permute_rows(const std::vector<std::size_t>& perm) const;

  private:
    std::uint32_t q_ = 2;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint32_t> a_;
};

std::size_t rank(const FieldMatrix& m);

// Solves m * v = x. Empty optional when x is outside the column span.
std::optional<FieldVector> solve_membership(const FieldMatrix& m, const FieldVector& x);

// Column-space basis indices: positions of k linearly independent rows of m
// (used to invert injective encoders on their image).
std::vector<std::size_t> independent_rows(const FieldMatrix& m);

// Text format: first line "q rows cols", then one row per line with
// space-separated entries. Round-trips bit-exactly.
std::string to_text(const FieldMatrix& m);
FieldMatrix parse_matrix(std::istream& in);
FieldMatrix parse_matrix_text(const std::string& text);
FieldMatrix load_matrix_file(const std::string& path);

}  // namespace scf::galois

#endif
