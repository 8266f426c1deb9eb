#include "enbar/exactlin.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace enbar::exactlin {

Ring Ring::fp(long p) {
  if (p < 2) throw ContractError("fp modulus must be >= 2, got " + std::to_string(p));
  // small trial division: desk-scale moduli are tiny
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0)
      throw ContractError("fp modulus must be prime, got " + std::to_string(p));
  return {RingKind::Fp, p};
}

std::string Ring::encode() const {
  switch (kind) {
    case RingKind::Z: return "z";
    case RingKind::Q: return "q";
    case RingKind::Fp: return "fp:" + std::to_string(p);
  }
  return "?";
}

Ring Ring::parse(const std::string& s) {
  if (s == "z" || s == "Z") return z();
  if (s == "q" || s == "Q") return q();
  if (s.rfind("fp:", 0) == 0) {
    char* end = nullptr;
    long p = std::strtol(s.c_str() + 3, &end, 10);
    if (end == nullptr || *end != '\0')
      throw ContractError("cannot parse ring '" + s + "'");
    return fp(p);
  }
  throw ContractError("cannot parse ring '" + s + "' (want z, q or fp:<prime>)");
}

Scalar::Scalar(Ring ring, mpz_class v) : ring_(ring), num_(std::move(v)), den_(1) {
  canonicalize();
}

Scalar::Scalar(Ring ring, mpz_class num, mpz_class den)
    : ring_(ring), num_(std::move(num)), den_(std::move(den)) {
  if (ring_.kind != RingKind::Q)
    throw ContractError("fractional scalar only makes sense over q");
  if (den_ == 0) throw ContractError("zero denominator");
  canonicalize();
}

void Scalar::canonicalize() {
  switch (ring_.kind) {
    case RingKind::Z:
      den_ = 1;
      break;
    case RingKind::Fp: {
      den_ = 1;
      mpz_class m = num_ % ring_.p;
      if (m < 0) m += ring_.p;
      num_ = m;
      break;
    }
    case RingKind::Q: {
      if (num_ == 0) {
        den_ = 1;
        break;
      }
      if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
      }
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
      num_ /= g;
      den_ /= g;
      break;
    }
  }
}

static void require_same_ring(const Ring& a, const Ring& b) {
  if (!(a == b))
    throw ContractError("ring mismatch: " + a.encode() + " vs " + b.encode());
}

Scalar Scalar::operator+(const Scalar& o) const {
  require_same_ring(ring_, o.ring_);
  if (ring_.kind == RingKind::Q)
    return Scalar(ring_, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  return Scalar(ring_, num_ + o.num_);
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
  require_same_ring(ring_, o.ring_);
  if (ring_.kind == RingKind::Q)
    return Scalar(ring_, num_ * o.num_, den_ * o.den_);
  return Scalar(ring_, num_ * o.num_);
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  r.num_ = -r.num_;
  r.canonicalize();
  return r;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw ContractError("inverse of zero");
  switch (ring_.kind) {
    case RingKind::Z:
      if (num_ == 1 || num_ == -1) return *this;
      throw ContractError("non-unit " + encode() + " has no inverse over z");
    case RingKind::Q:
      return Scalar(ring_, den_, num_);
    case RingKind::Fp: {
      mpz_class inv, p(ring_.p);
      if (mpz_invert(inv.get_mpz_t(), num_.get_mpz_t(), p.get_mpz_t()) == 0)
        throw ContractError("no inverse mod p");  // unreachable for prime p
      return Scalar(ring_, inv);
    }
  }
  throw ContractError("bad ring");
}

std::string Scalar::encode() const {
  std::string s = num_.get_str();
  if (den_ != 1) s += "/" + den_.get_str();
  return s;
}

SparseMatrix::SparseMatrix(Ring ring, int rows, int cols)
    : ring_(ring), rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ContractError("negative matrix dimension");
}

void SparseMatrix::set(int r, int c, const Scalar& v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw ContractError("matrix index out of range");
  require_same_ring(ring_, v.ring());
  if (v.is_zero())
    entries_.erase({r, c});
  else
    entries_[{r, c}] = v;
}

void SparseMatrix::add(int r, int c, const Scalar& v) { set(r, c, get(r, c) + v); }

Scalar SparseMatrix::get(int r, int c) const {
  auto it = entries_.find({r, c});
  return it == entries_.end() ? Scalar::zero(ring_) : it->second;
}

SparseMatrix SparseMatrix::times(const SparseMatrix& o) const {
  require_same_ring(ring_, o.ring_);
  if (cols_ != o.rows_) throw ContractError("shape mismatch in matrix product");
  SparseMatrix out(ring_, rows_, o.cols_);
  // group o's entries by row for the sparse product
  std::map<int, std::vector<std::pair<int, Scalar>>> by_row;
  for (const auto& [rc, v] : o.entries_) by_row[rc.first].push_back({rc.second, v});
  for (const auto& [rc, v] : entries_) {
    auto it = by_row.find(rc.second);
    if (it == by_row.end()) continue;
    for (const auto& [c2, w] : it->second) out.add(rc.first, c2, v * w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smith normal form (dense mpz core; matrices here are desk scale)

namespace {

using Dense = std::vector<std::vector<mpz_class>>;

Dense identity(int n) {
  Dense m(n, std::vector<mpz_class>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

void row_swap(Dense& a, int i, int j) { std::swap(a[i], a[j]); }
void col_swap(Dense& a, int i, int j) {
  for (auto& row : a) std::swap(row[i], row[j]);
}
// row_i -= q*row_j
void row_sub(Dense& a, int i, int j, const mpz_class& q) {
  if (q == 0) return;
  for (std::size_t c = 0; c < a[i].size(); ++c) a[i][c] -= q * a[j][c];
}
void col_sub(Dense& a, int i, int j, const mpz_class& q) {
  if (q == 0) return;
  for (auto& row : a) row[i] -= q * row[j];
}
void row_neg(Dense& a, int i) {
  for (auto& v : a[i]) v = -v;
}

Dense mul(const Dense& a, const Dense& b) {
  int n = (int)a.size(), m = n ? (int)a[0].size() : 0;
  int k = b.empty() ? 0 : (int)b[0].size();
  Dense out(n, std::vector<mpz_class>(k, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      if (a[i][j] == 0) continue;
      for (int c = 0; c < k; ++c)
        if (b[j][c] != 0) out[i][c] += a[i][j] * b[j][c];
    }
  return out;
}

}  // namespace

SnfResult smith_normal_form(const SparseMatrix& m) {
  if (!(m.ring() == Ring::z()))
    throw ContractError("smith_normal_form requires ring z");
  int R = m.rows(), C = m.cols();
  Dense a(R, std::vector<mpz_class>(C, 0));
  for (const auto& [rc, v] : m.entries()) a[rc.first][rc.second] = v.num();
  Dense orig = a;
  Dense u = identity(R), v = identity(C);

  int t = 0, lim = std::min(R, C);
  while (t < lim) {
    // pivot: smallest |value| in the active submatrix; ties broken by smaller
    // column, then smaller row (the pinned left-to-right rule)
    int pr = -1, pc = -1;
    mpz_class best;
    for (int j = t; j < C; ++j)
      for (int i = t; i < R; ++i) {
        if (a[i][j] == 0) continue;
        mpz_class ab = abs(a[i][j]);
        if (pr < 0 || ab < best) {
          best = ab;
          pr = i;
          pc = j;
        }
      }
    if (pr < 0) break;  // nothing left
    if (pr != t) { row_swap(a, pr, t); row_swap(u, pr, t); }
    if (pc != t) { col_swap(a, pc, t); col_swap(v, pc, t); }

    bool stable = false;
    while (!stable) {
      stable = true;
      for (int i = t + 1; i < R; ++i) {
        if (a[i][t] == 0) continue;
        mpz_class q = a[i][t] / a[t][t];  // truncated; remainder shrinks |.|
        row_sub(a, i, t, q);
        row_sub(u, i, t, q);
        if (a[i][t] != 0) {  // remainder smaller than pivot: promote it
          row_swap(a, i, t);
          row_swap(u, i, t);
          stable = false;
        }
      }
      for (int j = t + 1; j < C; ++j) {
        if (a[t][j] == 0) continue;
        mpz_class q = a[t][j] / a[t][t];
        col_sub(a, j, t, q);
        col_sub(v, j, t, q);
        if (a[t][j] != 0) {
          col_swap(a, j, t);
          col_swap(v, j, t);
          stable = false;
        }
      }
      if (!stable) continue;
      // pivot must divide every entry of the remaining submatrix
      for (int i = t + 1; i < R && stable; ++i)
        for (int j = t + 1; j < C && stable; ++j)
          if (a[i][j] % a[t][t] != 0) {
            row_sub(a, t, i, mpz_class(-1));  // row_t += row_i
            row_sub(u, t, i, mpz_class(-1));
            stable = false;
          }
    }
    if (a[t][t] < 0) { row_neg(a, t); row_neg(u, t); }
    ++t;
  }

  SnfResult res;
  for (int i = 0; i < t; ++i) res.factors.push_back(a[i][i]);
  res.U = std::move(u);
  res.V = std::move(v);

  // certification: U*A*V must equal the diagonal we report
  Dense check = mul(mul(res.U, orig), res.V);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) {
      mpz_class want = (i == j && i < t) ? res.factors[i] : mpz_class(0);
      if (check[i][j] != want)
        throw MathError("smith_normal_form internal certification failed");
    }
  return res;
}

// ---------------------------------------------------------------------------
// rank / kernel / solve

namespace {

// exact elimination over the fraction field (Q for z/q input, F_p otherwise);
// returns (rank, rref, pivot columns); rref rows are the nonzero ones
struct Echelon {
  int rank = 0;
  std::vector<std::vector<Scalar>> rows;
  std::vector<int> pivot_col;
};

Ring fraction_field(const Ring& r) {
  return r.kind == RingKind::Z ? Ring::q() : r;
}

Echelon echelon(const SparseMatrix& m, const std::vector<Scalar>* rhs = nullptr,
                std::vector<Scalar>* rhs_out = nullptr) {
  Ring f = fraction_field(m.ring());
  int R = m.rows(), C = m.cols();
  std::vector<std::vector<Scalar>> a(R, std::vector<Scalar>(C, Scalar::zero(f)));
  for (const auto& [rc, v] : m.entries())
    a[rc.first][rc.second] =
        m.ring().kind == RingKind::Z ? Scalar(f, v.num(), 1) : v;
  std::vector<Scalar> b;
  if (rhs) {
    for (const auto& s : *rhs)
      b.push_back(m.ring().kind == RingKind::Z ? Scalar(f, s.num(), 1) : s);
  }
  Echelon e;
  int row = 0;
  for (int col = 0; col < C && row < R; ++col) {
    int piv = -1;
    for (int i = row; i < R; ++i)
      if (!a[i][col].is_zero()) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(a[piv], a[row]);
    if (rhs) std::swap(b[piv], b[row]);
    Scalar inv = a[row][col].inverse();
    for (int j = col; j < C; ++j) a[row][j] = a[row][j] * inv;
    if (rhs) b[row] = b[row] * inv;
    for (int i = 0; i < R; ++i) {
      if (i == row || a[i][col].is_zero()) continue;
      Scalar f2 = a[i][col];
      for (int j = col; j < C; ++j) a[i][j] = a[i][j] - f2 * a[row][j];
      if (rhs) b[i] = b[i] - f2 * b[row];
    }
    e.pivot_col.push_back(col);
    ++row;
  }
  e.rank = row;
  e.rows.assign(a.begin(), a.begin() + row);
  if (rhs_out) *rhs_out = b;
  return e;
}

}  // namespace

int rank(const SparseMatrix& m) { return echelon(m).rank; }

std::vector<std::vector<Scalar>> kernel_basis(const SparseMatrix& m) {
  if (m.ring().kind == RingKind::Z) {
    SnfResult s = smith_normal_form(m);
    std::vector<std::vector<Scalar>> out;
    for (int j = s.rank(); j < m.cols(); ++j) {
      std::vector<Scalar> col;
      for (int i = 0; i < m.cols(); ++i) col.emplace_back(Ring::z(), s.V[i][j]);
      out.push_back(std::move(col));
    }
    return out;
  }
  Echelon e = echelon(m);
  Ring f = fraction_field(m.ring());
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : e.pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Scalar>> out;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Scalar> v(m.cols(), Scalar::zero(f));
    v[free] = Scalar::one(f);
    for (int r = 0; r < e.rank; ++r) v[e.pivot_col[r]] = -e.rows[r][free];
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<Scalar>> solve(const SparseMatrix& m,
                                         const std::vector<Scalar>& b) {
  if ((int)b.size() != m.rows()) throw ContractError("rhs length mismatch");
  if (m.ring().kind == RingKind::Z) {
    SnfResult s = smith_normal_form(m);
    // y solves D y = U b; then x = V y
    std::vector<mpz_class> ub(m.rows(), 0);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.rows(); ++j)
        if (s.U[i][j] != 0 && b[j].num() != 0) ub[i] += s.U[i][j] * b[j].num();
    std::vector<mpz_class> y(m.cols(), 0);
    for (int i = 0; i < m.rows(); ++i) {
      if (i < s.rank()) {
        if (ub[i] % s.factors[i] != 0) return std::nullopt;
        y[i] = ub[i] / s.factors[i];
      } else if (ub[i] != 0) {
        return std::nullopt;
      }
    }
    std::vector<Scalar> x;
    for (int i = 0; i < m.cols(); ++i) {
      mpz_class xi = 0;
      for (int j = 0; j < m.cols(); ++j)
        if (s.V[i][j] != 0 && y[j] != 0) xi += s.V[i][j] * y[j];
      x.emplace_back(Ring::z(), xi);
    }
    return x;
  }
  std::vector<Scalar> rhs;
  Echelon e;
  {
    std::vector<Scalar> btmp = b;
    e = echelon(m, &btmp, &rhs);
  }
  Ring f = fraction_field(m.ring());
  for (int i = e.rank; i < m.rows(); ++i)
    if (!rhs[i].is_zero()) return std::nullopt;
  std::vector<Scalar> x(m.cols(), Scalar::zero(f));
  for (int r = 0; r < e.rank; ++r) x[e.pivot_col[r]] = rhs[r];
  return x;
}

// ---------------------------------------------------------------------------

std::string HomologySummary::encode() const {
  std::ostringstream os;
  os << "rank " << free_rank << ", torsion [";
  for (std::size_t i = 0; i < torsion.size(); ++i)
    os << (i ? "," : "") << torsion[i].get_str();
  os << "]";
  return os.str();
}

HomologySummary chain_homology(const SparseMatrix& d_in,
                               const SparseMatrix& d_out) {
  require_same_ring(d_in.ring(), d_out.ring());
  if (d_out.cols() != d_in.rows())
    throw ContractError("chain_homology: cols(d_out) != rows(d_in)");
  SparseMatrix comp = d_out.times(d_in);
  if (!comp.is_zero()) {
    auto& [rc, v] = *comp.entries().begin();
    throw MathError("chain_homology: d_out*d_in nonzero at (" +
                    std::to_string(rc.first) + "," + std::to_string(rc.second) +
                    ") = " + v.encode() +
                    " (global sign oracle: not a chain complex)");
  }
  HomologySummary h;
  if (d_in.ring().kind == RingKind::Z) {
    SnfResult sin = smith_normal_form(d_in);
    h.free_rank = d_in.rows() - rank(d_out) - sin.rank();
    for (const auto& f : sin.factors)
      if (f > 1) h.torsion.push_back(f);
  } else {
    h.free_rank = d_in.rows() - rank(d_out) - rank(d_in);
  }
  if (h.free_rank < 0)
    throw MathError("chain_homology: negative rank (inconsistent input)");
  return h;
}

long uct_expected_fp_rank(const HomologySummary& at_d,
                          const HomologySummary& at_d_minus_1, long p) {
  auto t_p = [p](const HomologySummary& s) {
    long n = 0;
    for (const auto& f : s.torsion)
      if (f % p == 0) ++n;
    return n;
  };
  return at_d.free_rank + t_p(at_d) + t_p(at_d_minus_1);
}

}  // namespace enbar::exactlin
