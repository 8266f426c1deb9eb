#pragma once
// Exact linear algebra over Z, Q and F_p: scalars, sparse matrices, Smith
// normal form with certified unimodular transforms, ranks, kernels, exact
// solves and chain-homology summaries. All arithmetic is arbitrary precision
// (GMP); nothing here ever rounds.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace enbar {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// contract violations: wrong ring, shape mismatch, out-of-range index
struct ContractError : Error {
  using Error::Error;
};
// mathematical failures carrying a counterexample (e.g. d_out*d_in != 0)
struct MathError : Error {
  using Error::Error;
};

namespace exactlin {

enum class RingKind { Z, Q, Fp };

struct Ring {
  RingKind kind = RingKind::Z;
  long p = 0;  // modulus, only for Fp; must be prime

  static Ring z() { return {RingKind::Z, 0}; }
  static Ring q() { return {RingKind::Q, 0}; }
  static Ring fp(long p);
  bool operator==(const Ring&) const = default;
  bool is_field() const { return kind != RingKind::Z; }
  std::string encode() const;           // "z", "q", "fp:5"
  static Ring parse(const std::string&);  // throws ContractError on junk
};

// Canonical representatives: Fp in [0,p), Q reduced with positive
// denominator, Z with denominator 1.
class Scalar {
 public:
  Scalar() : ring_(Ring::z()), num_(0), den_(1) {}
  Scalar(Ring ring, long v) : Scalar(ring, mpz_class(v)) {}
  Scalar(Ring ring, mpz_class v);
  Scalar(Ring ring, mpz_class num, mpz_class den);  // Q only

  static Scalar zero(const Ring& r) { return Scalar(r, 0); }
  static Scalar one(const Ring& r) { return Scalar(r, 1); }

  const Ring& ring() const { return ring_; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  const mpz_class& num() const { return num_; }
  const mpz_class& den() const { return den_; }

  Scalar operator+(const Scalar&) const;
  Scalar operator-(const Scalar&) const;
  Scalar operator*(const Scalar&) const;
  Scalar operator-() const;
  Scalar inverse() const;  // fields only; ContractError over Z unless +-1
  bool operator==(const Scalar&) const = default;

  std::string encode() const;  // "7", "-2/3"

 private:
  void canonicalize();
  Ring ring_;
  mpz_class num_, den_;
};

class SparseMatrix {
 public:
  SparseMatrix(Ring ring, int rows, int cols);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Ring& ring() const { return ring_; }
  void set(int r, int c, const Scalar& v);  // storing zero erases
  void add(int r, int c, const Scalar& v);
  Scalar get(int r, int c) const;
  const std::map<std::pair<int, int>, Scalar>& entries() const {
    return entries_;
  }
  std::size_t nnz() const { return entries_.size(); }
  SparseMatrix times(const SparseMatrix&) const;
  bool is_zero() const { return entries_.empty(); }

 private:
  Ring ring_;
  int rows_, cols_;
  std::map<std::pair<int, int>, Scalar> entries_;  // row-major key order
};

// U*A*V == D is recomputed and asserted before returning (the certification
// postcondition); factors are the nonzero invariant factors d_1 | d_2 | ...
struct SnfResult {
  std::vector<mpz_class> factors;
  std::vector<std::vector<mpz_class>> U, V;  // unimodular, dense
  int rank() const { return static_cast<int>(factors.size()); }
};

SnfResult smith_normal_form(const SparseMatrix& m);  // ring must be Z

// Rank over the fraction field: exact rational elimination for Z/Q, mod-p for
// F_p.
int rank(const SparseMatrix& m);

// Lattice basis of the integer kernel (ring Z) or vector-space basis (fields).
std::vector<std::vector<Scalar>> kernel_basis(const SparseMatrix& m);

// Exact solve m*x = b; nullopt when no solution exists over the ring.
std::optional<std::vector<Scalar>> solve(const SparseMatrix& m,
                                         const std::vector<Scalar>& b);

struct HomologySummary {
  long free_rank = 0;
  std::vector<mpz_class> torsion;  // invariant factors > 1, Z only
  bool operator==(const HomologySummary&) const = default;
  std::string encode() const;  // "rank 2, torsion [2,4]"
};

// Homology at the middle term of  C_{d+1} --d_in--> C_d --d_out--> C_{d-1}.
// Matrices act on column vectors, so cols(d_out) == rows(d_in) == dim C_d.
// Throws MathError (message includes offending column) unless d_out*d_in = 0.
HomologySummary chain_homology(const SparseMatrix& d_in,
                               const SparseMatrix& d_out);

// Universal coefficients: expected dim_Fp H_d from the integral summaries at
// degrees d and d-1 (t_p counts torsion factors divisible by p).
long uct_expected_fp_rank(const HomologySummary& at_d,
                          const HomologySummary& at_d_minus_1, long p);

}  // namespace exactlin
}  // namespace enbar
