#include "scf/codes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace scf::codes {

using galois::mod_add;
using galois::mod_mul;

FieldVector nth_vector(std::uint32_t q, std::size_t len, std::uint64_t index) {
    FieldVector v(q, len);
    for (std::size_t i = 0; i < len; ++i) {
        v.set(i, static_cast<std::uint32_t>(index % q));
        index /= q;
    }
    return v;
}

GeneratorCode GeneratorCode::create(FieldMatrix m) {
    GeneratorCode c;
    c.n = m.rows();
    c.k = m.cols();
    c.q = m.q();
    if (c.k > c.n) throw Error("generator must have at least as many rows as columns");
    if (galois::rank(m) != c.k) throw Error("generator matrix is not full column rank");
    c.matrix = std::move(m);
    return c;
}

GeneratorCode repetition_code(std::size_t n, std::uint32_t q) {
    FieldMatrix m(q, n, 1);
    for (std::size_t i = 0; i < n; ++i) m.set(i, 0, 1);
    return GeneratorCode::create(std::move(m));
}

GeneratorCode single_parity_check_code(std::size_t n, std::uint32_t q) {
    if (n < 2) throw Error("single parity check needs n >= 2");
    FieldMatrix m(q, n, n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        m.set(j, j, 1);
        m.set(n - 1, j, q - 1);  // last symbol makes the sum vanish
    }
    return GeneratorCode::create(std::move(m));
}

FieldVector HashSplit::combine(const FieldVector& m, const FieldVector& l) const {
    return F1 * m + F2 * l;
}

void HashSplit::validate() const {
    if (kbar > k) throw Error("hash split: kbar exceeds k");
    if (F.rows() != k - kbar || F.cols() != k) throw Error("hash split: F shape");
    if (F1.rows() != k || F1.cols() != k - kbar) throw Error("hash split: F1 shape");
    if (F2.rows() != k || F2.cols() != kbar) throw Error("hash split: F2 shape");
    if (galois::rank(F) != k - kbar) throw Error("hash split: F rank deficient");
    if (!(F * F1 == FieldMatrix::identity(q, k - kbar)))
        throw Error("hash split: F*F1 is not the identity");
    if (kbar > 0 && !(F * F2).is_zero()) throw Error("hash split: F*F2 is not zero");
    // [F1 | F2] must map (m, l) onto all of F_q^k.
    FieldMatrix joint(q, k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k - kbar; ++j) joint.set(i, j, F1.at(i, j));
        for (std::size_t j = 0; j < kbar; ++j) joint.set(i, k - kbar + j, F2.at(i, j));
    }
    if (galois::rank(joint) != k) throw Error("hash split: [F1|F2] is singular");
}

HashSplit make_hash_split(std::size_t k, std::size_t kbar, std::uint32_t q) {
    if (kbar > k) throw Error("hash split: kbar exceeds k");
    HashSplit s;
    s.k = k;
    s.kbar = kbar;
    s.q = q;
    s.F = FieldMatrix(q, k - kbar, k);
    s.F1 = FieldMatrix(q, k, k - kbar);
    s.F2 = FieldMatrix(q, k, kbar);
    for (std::size_t i = 0; i < k - kbar; ++i) {
        s.F.set(i, i, 1);
        s.F1.set(i, i, 1);
    }
    for (std::size_t i = 0; i < kbar; ++i) s.F2.set(k - kbar + i, i, 1);
    s.validate();
    return s;
}

Composition composition_of(const FieldVector& x) {
    Composition c;
    c.counts.assign(x.q(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) ++c.counts[x[i]];
    return c;
}

std::uint64_t Composition::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::string to_string(const Composition& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.counts.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(c.counts[i]);
    }
    s += ')';
    return s;
}

Multinomial multinomial(const Composition& c) {
    // Exact product of binomials when everything stays below 2^63;
    // log value via lgamma either way.
    std::uint64_t n = c.total();
    double lg = std::lgamma(static_cast<double>(n) + 1.0);
    for (auto cnt : c.counts) lg -= std::lgamma(static_cast<double>(cnt) + 1.0);

    bool exact = true;
    unsigned __int128 acc = 1;
    std::uint64_t consumed = 0;
    for (auto cnt : c.counts) {
        for (std::uint64_t i = 1; i <= cnt && exact; ++i) {
            acc = acc * (consumed + i) / i;  // C(consumed+i, i) stays integral stepwise
            if (acc > (static_cast<unsigned __int128>(1) << 62)) exact = false;
        }
        consumed += cnt;
    }
    Multinomial m;
    m.log_value = lg;
    if (exact && acc <= (static_cast<unsigned __int128>(1) << 53)) {
        m.value = static_cast<double>(static_cast<std::uint64_t>(acc));
        m.exact = true;
    } else {
        m.value = std::exp(lg);
        m.exact = false;
    }
    return m;
}

void EnsembleSpec::validate() const {
    if (k > n) throw Error("ensemble: k exceeds n");
    if (!galois::is_prime(q)) throw Error("ensemble: q must be prime");
    if ((kind == EnsembleKind::fixed_permuted) != base_code.has_value())
        throw Error("ensemble: base code must be present exactly for the fixed-permuted kind");
    if (base_code && (base_code->n != n || base_code->k != k || base_code->q != q))
        throw Error("ensemble: base code dimensions disagree with the requested shape");
}

namespace {

FieldMatrix random_matrix(std::uint32_t q, std::size_t rows, std::size_t cols,
                          std::mt19937_64& eng) {
    FieldMatrix m(q, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m.set(i, j, static_cast<std::uint32_t>(eng() % q));
    return m;
}

FieldMatrix toeplitz_from_diagonals(std::uint32_t q, std::size_t rows, std::size_t cols,
                                    const std::vector<std::uint32_t>& d) {
    // d has rows+cols-1 entries; entry (i,j) reads d[i - j + cols - 1].
    FieldMatrix t(q, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) t.set(i, j, d[i - j + cols - 1]);
    return t;
}

FieldMatrix toeplitz_systematic(std::uint32_t q, std::size_t n, std::size_t k,
                                const std::vector<std::uint32_t>& d) {
    FieldMatrix g(q, n, k);
    for (std::size_t i = 0; i < k; ++i) g.set(i, i, 1);
    if (n > k) {
        FieldMatrix t = toeplitz_from_diagonals(q, n - k, k, d);
        for (std::size_t i = 0; i < n - k; ++i)
            for (std::size_t j = 0; j < k; ++j) g.set(k + i, j, t.at(i, j));
    }
    return g;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& eng) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[eng() % i]);
    return p;
}

bool contains(const FieldMatrix& g, const FieldVector& x) {
    return galois::solve_membership(g, x).has_value();
}

double pow_u64(double b, std::uint64_t e) {
    double r = 1.0;
    while (e--) r *= b;
    return r;
}

}  // namespace

GeneratorCode sample_code(const EnsembleSpec& spec) {
    spec.validate();
    std::mt19937_64 eng(spec.seed);
    switch (spec.kind) {
        case EnsembleKind::uniform: {
            for (int attempt = 0; attempt < 256; ++attempt) {
                FieldMatrix m = random_matrix(spec.q, spec.n, spec.k, eng);
                if (galois::rank(m) == spec.k) return GeneratorCode::create(std::move(m));
            }
            throw Error("ensemble: no full-rank draw within 256 attempts");
        }
        case EnsembleKind::toeplitz: {
            std::vector<std::uint32_t> d(spec.n >= 1 ? spec.n - 1 : 0);
            for (auto& v : d) v = static_cast<std::uint32_t>(eng() % spec.q);
            return GeneratorCode::create(toeplitz_systematic(spec.q, spec.n, spec.k, d));
        }
        case EnsembleKind::fixed_permuted: {
            auto perm = random_permutation(spec.n, eng);
            return GeneratorCode::create(spec.base_code->matrix.permute_rows(perm));
        }
    }
    throw Error("ensemble: unknown kind");
}

MembershipProbability membership_probability(const EnsembleSpec& spec, const FieldVector& x,
                                             std::uint64_t mc_samples) {
    spec.validate();
    if (x.size() != spec.n) throw Error("membership: vector length mismatch");
    if (x.q() != spec.q) throw Error("membership: modulus mismatch");
    if (x.is_zero()) throw Error("membership: x must be nonzero");

    const double log2q = std::log2(static_cast<double>(spec.q));
    MembershipProbability out;

    switch (spec.kind) {
        case EnsembleKind::uniform: {
            double bits = static_cast<double>(spec.n * spec.k) * log2q;
            if (bits <= 24.0) {
                std::uint64_t total = 1, hit = 0;
                for (std::size_t i = 0; i < spec.n * spec.k; ++i) total *= spec.q;
                for (std::uint64_t idx = 0; idx < total; ++idx) {
                    FieldMatrix m(spec.q, spec.n, spec.k);
                    std::uint64_t t = idx;
                    for (std::size_t i = 0; i < spec.n; ++i)
                        for (std::size_t j = 0; j < spec.k; ++j) {
                            m.set(i, j, static_cast<std::uint32_t>(t % spec.q));
                            t /= spec.q;
                        }
                    if (contains(m, x)) ++hit;
                }
                out.value = static_cast<double>(hit) / static_cast<double>(total);
                out.exact = true;
                return out;
            }
            // Monte Carlo over raw uniform draws (the same population the
            // exact enumeration covers).
            std::mt19937_64 eng(rng::derive_seed(spec.seed, 0xa11ce));
            std::uint64_t hit = 0;
            for (std::uint64_t i = 0; i < mc_samples; ++i)
                if (contains(random_matrix(spec.q, spec.n, spec.k, eng), x)) ++hit;
            out.value = static_cast<double>(hit) / static_cast<double>(mc_samples);
            out.samples = mc_samples;
            return out;
        }
        case EnsembleKind::toeplitz: {
            std::size_t nd = spec.n >= 1 ? spec.n - 1 : 0;
            double bits = static_cast<double>(nd) * log2q;
            if (bits <= 24.0) {
                std::uint64_t total = 1, hit = 0;
                for (std::size_t i = 0; i < nd; ++i) total *= spec.q;
                std::vector<std::uint32_t> d(nd, 0);
                for (std::uint64_t idx = 0; idx < total; ++idx) {
                    std::uint64_t t = idx;
                    for (std::size_t i = 0; i < nd; ++i) {
                        d[i] = static_cast<std::uint32_t>(t % spec.q);
                        t /= spec.q;
                    }
                    if (contains(toeplitz_systematic(spec.q, spec.n, spec.k, d), x)) ++hit;
                }
                out.value = static_cast<double>(hit) / static_cast<double>(total);
                out.exact = true;
                return out;
            }
            break;
        }
        case EnsembleKind::fixed_permuted: {
            if (spec.n <= 10) {
                std::vector<std::size_t> perm(spec.n);
                std::iota(perm.begin(), perm.end(), std::size_t{0});
                std::uint64_t total = 0, hit = 0;
                do {
                    ++total;
                    if (contains(spec.base_code->matrix.permute_rows(perm), x)) ++hit;
                } while (std::next_permutation(perm.begin(), perm.end()));
                out.value = static_cast<double>(hit) / static_cast<double>(total);
                out.exact = true;
                return out;
            }
            break;
        }
    }

    std::mt19937_64 eng(rng::derive_seed(spec.seed, 0xa11ce));
    std::uint64_t hit = 0;
    for (std::uint64_t i = 0; i < mc_samples; ++i) {
        EnsembleSpec s = spec;
        s.seed = eng();
        if (contains(sample_code(s).matrix, x)) ++hit;
    }
    out.value = static_cast<double>(hit) / static_cast<double>(mc_samples);
    out.samples = mc_samples;
    return out;
}

std::map<Composition, std::uint64_t> composition_counts(const GeneratorCode& code) {
    double bits = static_cast<double>(code.k) * std::log2(static_cast<double>(code.q));
    if (bits > 20.0) throw Error("composition counts: q^k exceeds the enumeration budget");
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < code.k; ++i) total *= code.q;

    std::map<Composition, std::uint64_t> counts;
    for (std::uint64_t idx = 1; idx < total; ++idx)  // skip the zero word
        ++counts[composition_of(code.encode(nth_vector(code.q, code.k, idx)))];
    return counts;
}

DeviationReport deviation_A(const GeneratorCode& code) {
    if (code.k == 0) throw Error("deviation: k must be positive");
    auto counts = composition_counts(code);
    const double logq = std::log(static_cast<double>(code.q));

    DeviationReport best;
    best.log_a = -std::numeric_limits<double>::infinity();
    for (const auto& [comp, cnt] : counts) {
        Multinomial mn = multinomial(comp);
        double log_term = std::log(static_cast<double>(cnt)) +
                          static_cast<double>(code.n - code.k) * logq - mn.log_value;
        if (log_term > best.log_a) {
            best.log_a = log_term;
            best.argmax = comp;
            double qpow = pow_u64(static_cast<double>(code.q), code.n - code.k);
            if (mn.exact && qpow < 9.0e15 && static_cast<double>(cnt) < 9.0e15) {
                best.a = static_cast<double>(cnt) * qpow / mn.value;
                best.exact = true;
            } else {
                best.a = std::exp(log_term);
                best.exact = false;
            }
        }
    }
    return best;
}

DeviationReport deviation_A_ensemble(const EnsembleSpec& spec, std::size_t num_samples) {
    if (num_samples == 0) throw Error("deviation: need at least one sample");
    if (spec.kind == EnsembleKind::fixed_permuted)
        return deviation_A(*spec.base_code);  // permutation-invariant, no sampling needed

    // Average N(lambda, G) over sampled codes first, then maximise.
    std::map<Composition, double> mean_counts;
    std::mt19937_64 eng(rng::derive_seed(spec.seed, 0xdeadu));
    for (std::size_t s = 0; s < num_samples; ++s) {
        EnsembleSpec draw = spec;
        draw.seed = eng();
        for (const auto& [comp, cnt] : composition_counts(sample_code(draw)))
            mean_counts[comp] += static_cast<double>(cnt) / static_cast<double>(num_samples);
    }

    const double logq = std::log(static_cast<double>(spec.q));
    DeviationReport best;
    best.exact = false;
    best.log_a = -std::numeric_limits<double>::infinity();
    for (const auto& [comp, mean] : mean_counts) {
        double log_term = std::log(mean) +
                          static_cast<double>(spec.n - spec.k) * logq -
                          multinomial(comp).log_value;
        if (log_term > best.log_a) {
            best.log_a = log_term;
            best.argmax = comp;
            best.a = std::exp(log_term);
        }
    }
    return best;
}

FieldVector encode_node(const FieldVector& v, const GeneratorCode& code, const FieldVector& e) {
    if (e.size() != code.n) throw Error("encode: shift vector length mismatch");
    return code.encode(v) + e;
}

FieldMatrix sample_toeplitz_hash(std::size_t rows, std::size_t cols, std::uint32_t q,
                                 std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::vector<std::uint32_t> d(rows + cols >= 1 ? rows + cols - 1 : 0);
    for (auto& v : d) v = static_cast<std::uint32_t>(eng() % q);
    return toeplitz_from_diagonals(q, rows, cols, d);
}

FieldMatrix parse_alist(std::istream& in) {
    std::vector<long long> tok;
    long long v;
    while (in >> v) tok.push_back(v);
    if (tok.size() < 4) throw Error("alist: truncated header");

    std::size_t p = 0;
    auto next = [&]() {
        if (p >= tok.size()) throw Error("alist: unexpected end of data");
        return tok[p++];
    };
    const std::size_t n_cols = static_cast<std::size_t>(next());
    const std::size_t n_rows = static_cast<std::size_t>(next());
    const std::size_t max_col = static_cast<std::size_t>(next());
    const std::size_t max_row = static_cast<std::size_t>(next());

    std::vector<std::size_t> col_deg(n_cols), row_deg(n_rows);
    for (auto& d : col_deg) d = static_cast<std::size_t>(next());
    for (auto& d : row_deg) d = static_cast<std::size_t>(next());

    std::size_t remaining = tok.size() - p;
    std::size_t padded = n_cols * max_col + n_rows * max_row;
    std::size_t packed = std::accumulate(col_deg.begin(), col_deg.end(), std::size_t{0}) +
                         std::accumulate(row_deg.begin(), row_deg.end(), std::size_t{0});
    bool is_padded;
    if (remaining == padded)
        is_padded = true;
    else if (remaining == packed)
        is_padded = false;
    else
        throw Error("alist: index section has unexpected length");

    FieldMatrix h(2, n_rows, n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) {
        std::size_t count = is_padded ? max_col : col_deg[j];
        for (std::size_t t = 0; t < count; ++t) {
            long long idx = next();
            if (idx == 0) continue;  // padding
            if (idx < 1 || static_cast<std::size_t>(idx) > n_rows)
                throw Error("alist: row index out of range");
            h.set(static_cast<std::size_t>(idx) - 1, j, 1);
        }
    }
    // Row lists only cross-check the column lists.
    for (std::size_t i = 0; i < n_rows; ++i) {
        std::size_t count = is_padded ? max_row : row_deg[i];
        for (std::size_t t = 0; t < count; ++t) {
            long long idx = next();
            if (idx == 0) continue;
            if (idx < 1 || static_cast<std::size_t>(idx) > n_cols)
                throw Error("alist: column index out of range");
            if (h.at(i, static_cast<std::size_t>(idx) - 1) != 1)
                throw Error("alist: row and column lists disagree");
        }
    }
    return h;
}

FieldMatrix load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open alist file: " + path);
    return parse_alist(in);
}

GeneratorCode generator_from_parity(const FieldMatrix& parity) {
    const std::uint32_t q = parity.q();
    const std::size_t n = parity.cols();

    // Null-space basis from the reduced echelon form of H.
    std::vector<std::vector<std::uint32_t>> rows(parity.rows(),
                                                 std::vector<std::uint32_t>(n));
    for (std::size_t i = 0; i < parity.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) rows[i][j] = parity.at(i, j);

    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        std::uint32_t ip = galois::mod_inv(rows[r][c], q);
        for (std::size_t j = 0; j < n; ++j) rows[r][j] = mod_mul(rows[r][j], ip, q);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            std::uint32_t f = rows[i][c];
            for (std::size_t j = 0; j < n; ++j)
                rows[i][j] = galois::mod_sub(rows[i][j], mod_mul(f, rows[r][j], q), q);
        }
        pivot_cols.push_back(c);
        ++r;
    }

    std::vector<bool> is_pivot(n, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    const std::size_t k = free_cols.size();
    if (k == 0) throw Error("parity check has a trivial null space");
    FieldMatrix g(q, n, k);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t fc = free_cols[j];
        g.set(fc, j, 1);
        for (std::size_t i = 0; i < pivot_cols.size(); ++i)
            g.set(pivot_cols[i], j, galois::mod_sub(0, rows[i][fc], q));
    }
    return GeneratorCode::create(std::move(g));
}

}  // namespace scf::codes
