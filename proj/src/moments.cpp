#include "bko/moments.hpp"

#include <array>

namespace bko {

std::string_view to_string(MomentFamily family) {
  switch (family) {
    case MomentFamily::upsilon:
      return "upsilon";
    case MomentFamily::mu:
      return "mu";
    case MomentFamily::mu_star:
      return "mu_star";
    case MomentFamily::T:
      return "T";
    case MomentFamily::u:
      return "u";
  }
  return "?";
}

MomentFamily parse_family(std::string_view name) {
  for (MomentFamily f : {MomentFamily::upsilon, MomentFamily::mu, MomentFamily::mu_star, MomentFamily::T,
                         MomentFamily::u})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown moment family '" + std::string(name) + "' (upsilon, mu, mu_star, T, u)");
}

nlohmann::json MomentTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < entries.size(); ++r)
    rows.push_back({{"r", r}, {"value", entries[r].to_json()}, {"display", to_display(entries[r])}});
  return {{"family", std::string(to_string(family))},
          {"n", to_string(params.n)},
          {"a", to_string(params.a)},
          {"entries", rows}};
}

namespace {

const RatFunc& X() {
  static const RatFunc x = RatFunc::monomial(1);
  return x;
}

const RatFunc& one_plus_x() {
  static const RatFunc f({1, 1});
  return f;
}

// x/(1+x)
const RatFunc& x_over_one_plus_x() {
  static const RatFunc f({0, 1}, 1);
  return f;
}

BigInteger binomial(unsigned n, unsigned k) {
  BigInteger out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

BigRational power(const BigRational& b, unsigned e) {
  BigRational out = 1;
  for (unsigned i = 0; i < e; ++i) out *= b;
  return out;
}

// every recurrence divides by (n+1)(1+x)
RatFunc divide_step(const RatFunc& numerator, const ExactParams& p) {
  const std::array<BigRational, 2> divisor{p.n + 1, p.n + 1};
  return divide_exact(numerator, divisor);
}

void check_params(const ExactParams& p) {
  if (sgn(p.n) <= 0) throw ConfigError("moment engine requires n > 0");
  if (sgn(p.a) < 0) throw ConfigError("moment engine requires a >= 0");
}

}  // namespace

MomentTable upsilon_sym(unsigned r_max, const ExactParams& p) {
  check_params(p);
  MomentTable t{p, MomentFamily::upsilon, {RatFunc::constant(1)}};
  const RatFunc x_cube = X() * one_plus_x() * one_plus_x();              // x(1+x)^2
  const RatFunc shift = (RatFunc::constant(p.a) + p.n * one_plus_x()) * X();  // (a + n(1+x)) x
  for (unsigned r = 0; r < r_max; ++r) {
    const RatFunc& v = t.entries[r];
    t.entries.push_back(divide_step(x_cube * v.derivative() + shift * v, p));
  }
  return t;
}

MomentTable mu_sym(unsigned r_max, const ExactParams& p) {
  check_params(p);
  MomentTable t{p, MomentFamily::mu, {RatFunc::constant(1)}};
  const RatFunc x_cube = X() * one_plus_x() * one_plus_x();
  // a x - x(1+x)
  const RatFunc drift = p.a * X() - X() * one_plus_x();
  for (unsigned r = 0; r < r_max; ++r) {
    const RatFunc& m = t.entries[r];
    RatFunc num = x_cube * m.derivative() + drift * m;
    if (r > 0) num += BigRational(r) * x_cube * t.entries[r - 1];
    t.entries.push_back(divide_step(num, p));
  }
  return t;
}

MomentTable mu_star_sym(unsigned r_max, const ExactParams& p) {
  const MomentTable mu = mu_sym(r_max, p);
  MomentTable t{p, MomentFamily::mu_star, {}};
  for (unsigned r = 0; r <= r_max; ++r) {
    // n^{-r} sum_j C(r,j) x^{r-j} (n+1)^j mu_j
    RatFunc acc;
    for (unsigned j = 0; j <= r; ++j)
      acc += BigRational(binomial(r, j)) * power(p.n + 1, j) * RatFunc::monomial(r - j) * mu[j];
    t.entries.push_back(acc / power(p.n, r));
  }
  return t;
}

MomentTable kantorovich_moment_sym(unsigned r_max, const ExactParams& p) {
  const MomentTable ups = upsilon_sym(r_max, p);
  MomentTable t{p, MomentFamily::T, {}};
  for (unsigned r = 0; r <= r_max; ++r) {
    RatFunc acc;
    for (unsigned j = 0; j <= r; ++j)
      acc += BigRational(binomial(r + 1, j)) / power(p.n + 1, r - j) * ups[j];
    t.entries.push_back(acc / BigRational(r + 1));
  }
  return t;
}

MomentTable kantorovich_central_sym(unsigned r_max, const ExactParams& p) {
  const MomentTable mu = mu_sym(r_max, p);
  MomentTable t{p, MomentFamily::u, {}};
  for (unsigned r = 0; r <= r_max; ++r) {
    RatFunc acc;
    for (unsigned v = 1; v <= r + 1; ++v)
      acc += BigRational(binomial(r + 1, v)) / power(p.n + 1, v - 1) * mu[r + 1 - v];
    t.entries.push_back(acc / BigRational(r + 1));
  }
  return t;
}

MomentTable moment_table(MomentFamily family, unsigned r_max, const ExactParams& p) {
  switch (family) {
    case MomentFamily::upsilon:
      return upsilon_sym(r_max, p);
    case MomentFamily::mu:
      return mu_sym(r_max, p);
    case MomentFamily::mu_star:
      return mu_star_sym(r_max, p);
    case MomentFamily::T:
      return kantorovich_moment_sym(r_max, p);
    case MomentFamily::u:
      return kantorovich_central_sym(r_max, p);
  }
  throw ConfigError("unknown moment family");
}

RatFunc gamma_sym(const ExactParams& p) {
  const MomentTable u = kantorovich_central_sym(2, p);
  const RatFunc shift = RatFunc::constant(BigRational(1, 2)) - X() + p.a * x_over_one_plus_x();
  return u[2] + shift * shift / power(p.n + 1, 2);
}

namespace closed_form {

RatFunc upsilon1(const ExactParams& p) {
  return (p.n * X() + p.a * x_over_one_plus_x()) / (p.n + 1);
}

RatFunc mu1(const ExactParams& p) { return (p.a * x_over_one_plus_x() - X()) / (p.n + 1); }

RatFunc T1(const ExactParams& p) {
  return (p.n * X() + p.a * x_over_one_plus_x() + RatFunc::constant(BigRational(1, 2))) / (p.n + 1);
}

RatFunc T2(const ExactParams& p) {
  const RatFunc& x = X();
  const RatFunc& q = x_over_one_plus_x();
  RatFunc body = p.n * p.n * x * x;
  body += p.n * (x * x + BigRational(2) * x + BigRational(2) * p.a * x * q);
  body += p.a * p.a * q * q + BigRational(2) * p.a * q + RatFunc::constant(BigRational(1, 3));
  return body / power(p.n + 1, 2);
}

RatFunc u1(const ExactParams& p) {
  return (p.a * x_over_one_plus_x() - X() + RatFunc::constant(BigRational(1, 2))) / (p.n + 1);
}

RatFunc u2(const ExactParams& p) {
  const RatFunc& x = X();
  const RatFunc aq = p.a * x_over_one_plus_x();
  const RatFunc one = RatFunc::constant(1);
  RatFunc body = p.n * x * (x + one) - x * (one - x);
  body += aq * (aq + BigRational(2) * (one - x));
  body += RatFunc::constant(BigRational(1, 3));
  return body / power(p.n + 1, 2);
}

RatFunc gamma(const ExactParams& p) {
  const RatFunc& x = X();
  const RatFunc& q = x_over_one_plus_x();
  RatFunc body = (p.n + 2) * x * x + (p.n - 2) * x;
  body += BigRational(2) * p.a * p.a * q * q;
  body -= BigRational(4) * p.a * x * q;
  body += BigRational(3) * p.a * q;
  body += RatFunc::constant(BigRational(7, 12));
  return body / power(p.n + 1, 2);
}

}  // namespace closed_form

std::shared_ptr<const MomentTable> MomentCache::get(MomentFamily family, unsigned r_max, const ExactParams& p) {
  Key key{to_string(p.n), to_string(p.a), static_cast<int>(family)};
  {
    std::lock_guard lock(mutex_);
    const auto it = tables_.find(key);
    if (it != tables_.end() && it->second->r_max() >= r_max) return it->second;
  }
  auto table = std::make_shared<const MomentTable>(moment_table(family, r_max, p));
  std::lock_guard lock(mutex_);
  auto& slot = tables_[key];
  if (!slot || slot->r_max() < r_max) slot = table;
  return slot;
}

void MomentCache::clear() {
  std::lock_guard lock(mutex_);
  tables_.clear();
}

MomentCache& moment_cache() {
  static MomentCache cache;
  return cache;
}

}  // namespace bko
