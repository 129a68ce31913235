#include "bko/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bko {

BigRational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ConfigError("empty rational literal");
  BigRational q;
  // Decimal literals ("0.25", "1e-3") are read exactly as decimals, not as doubles.
  if (s.find_first_of(".eE") != std::string::npos && s.find('/') == std::string::npos) {
    std::size_t epos = s.find_first_of("eE");
    std::string mant = s.substr(0, epos);
    long exp10 = 0;
    if (epos != std::string::npos) {
      try {
        exp10 = std::stol(s.substr(epos + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad rational literal: " + s);
      }
    }
    std::size_t dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      exp10 -= static_cast<long>(mant.size() - dot - 1);
      digits.erase(dot, 1);
    }
    BigInteger num;
    if (num.set_str(digits, 10) != 0) throw ConfigError("bad rational literal: " + s);
    BigInteger scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    q = exp10 >= 0 ? BigRational(num * scale) : BigRational(num, scale);
  } else {
    if (q.set_str(s, 10) != 0) throw ConfigError("bad rational literal: " + s);
    if (q.get_den() == 0) throw ConfigError("zero denominator: " + s);
  }
  q.canonicalize();
  return q;
}

std::string to_string(const BigRational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigRational exact_rational(double v) {
  if (!std::isfinite(v)) throw NumericalError("non-finite value has no rational form");
  return BigRational(v);
}

RatFunc::RatFunc(std::vector<BigRational> coeffs, unsigned pole_order)
    : coeffs_(std::move(coeffs)), pole_order_(pole_order) {
  normalize();
}

RatFunc RatFunc::constant(const BigRational& c) { return RatFunc({c}, 0); }

RatFunc RatFunc::monomial(unsigned power, const BigRational& c) {
  std::vector<BigRational> p(power + 1);
  p[power] = c;
  return RatFunc(std::move(p), 0);
}

RatFunc RatFunc::inverse_power(unsigned m, const BigRational& c) { return RatFunc({c}, m); }

void RatFunc::normalize() {
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
  if (coeffs_.empty()) {
    pole_order_ = 0;
    return;
  }
  // Synthetic division by (x+1) while p(-1) = 0.
  while (pole_order_ > 0 && coeffs_.size() > 1) {
    BigRational at_minus_one = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) at_minus_one = -at_minus_one + *it;
    if (sgn(at_minus_one) != 0) break;
    std::vector<BigRational> quotient(coeffs_.size() - 1);
    // p(x) = (x+1) q(x): highest coefficient first, q_{d-1} = p_d, q_{i-1} = p_i - q_i.
    const std::size_t d = coeffs_.size() - 1;
    quotient[d - 1] = coeffs_[d];
    for (std::size_t i = d - 1; i >= 1; --i) quotient[i - 1] = coeffs_[i] - quotient[i];
    coeffs_ = std::move(quotient);
    --pole_order_;
  }
}

BigRational RatFunc::operator()(const BigRational& x) const {
  if (x == -1) throw PoleError("RatFunc evaluated at x = -1");
  BigRational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  if (pole_order_ == 0) return acc;
  BigRational base = 1 + x;
  BigRational den = 1;
  for (unsigned i = 0; i < pole_order_; ++i) den *= base;
  return acc / den;
}

double RatFunc::evaluate_exact(double x) const { return (*this)(exact_rational(x)).get_d(); }

RatFunc RatFunc::derivative() const {
  if (coeffs_.empty()) return {};
  // d/dx [p/(1+x)^m] = [p'(1+x) - m p] / (1+x)^{m+1}
  const std::size_t d = coeffs_.size();
  std::vector<BigRational> out(d + 1);
  for (std::size_t i = 1; i < d; ++i) {
    BigRational dp = coeffs_[i] * static_cast<unsigned long>(i);
    out[i - 1] += dp;
    out[i] += dp;
  }
  const BigRational m(pole_order_);
  for (std::size_t i = 0; i < d; ++i) out[i] -= m * coeffs_[i];
  return RatFunc(std::move(out), pole_order_ + 1);
}

namespace {

// p * (1+x)^j
std::vector<BigRational> raise(const std::vector<BigRational>& p, unsigned j) {
  std::vector<BigRational> out = p;
  for (unsigned s = 0; s < j; ++s) {
    std::vector<BigRational> next(out.size() + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
      next[i] += out[i];
      next[i + 1] += out[i];
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

RatFunc& RatFunc::operator+=(const RatFunc& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) return *this = rhs;
  const unsigned m = std::max(pole_order_, rhs.pole_order_);
  std::vector<BigRational> a = raise(coeffs_, m - pole_order_);
  std::vector<BigRational> b = raise(rhs.coeffs_, m - rhs.pole_order_);
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  coeffs_ = std::move(a);
  pole_order_ = m;
  normalize();
  return *this;
}

RatFunc& RatFunc::operator-=(const RatFunc& rhs) { return *this += -rhs; }

RatFunc& RatFunc::operator*=(const RatFunc& rhs) {
  if (is_zero() || rhs.is_zero()) return *this = RatFunc{};
  std::vector<BigRational> out(coeffs_.size() + rhs.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
  coeffs_ = std::move(out);
  pole_order_ += rhs.pole_order_;
  normalize();
  return *this;
}

RatFunc& RatFunc::operator*=(const BigRational& c) {
  for (auto& q : coeffs_) q *= c;
  normalize();
  return *this;
}

RatFunc& RatFunc::operator/=(const BigRational& c) {
  if (sgn(c) == 0) throw NumericalError("RatFunc divided by zero");
  for (auto& q : coeffs_) q /= c;
  return *this;
}

RatFunc RatFunc::operator-() const {
  RatFunc out = *this;
  for (auto& q : out.coeffs_) q = -q;
  return out;
}

nlohmann::json RatFunc::to_json() const {
  nlohmann::json num = nlohmann::json::array();
  for (const auto& q : coeffs_) num.push_back(to_string(q));
  return {{"num", num}, {"pole_order", pole_order_}};
}

RatFunc RatFunc::from_json(const nlohmann::json& j) {
  std::vector<BigRational> coeffs;
  for (const auto& s : j.at("num")) coeffs.push_back(parse_rational(s.get<std::string>()));
  return RatFunc(std::move(coeffs), j.at("pole_order").get<unsigned>());
}

RatFunc rf_arith(const RatFunc& lhs, const RatFunc& rhs, ArithOp op) {
  switch (op) {
    case ArithOp::add:
      return lhs + rhs;
    case ArithOp::sub:
      return lhs - rhs;
    case ArithOp::mul:
      return lhs * rhs;
  }
  return {};
}

RatFunc rf_derive(const RatFunc& f) { return f.derivative(); }

RatFunc divide_exact(const RatFunc& f, std::span<const BigRational> divisor) {
  std::vector<BigRational> d(divisor.begin(), divisor.end());
  while (!d.empty() && sgn(d.back()) == 0) d.pop_back();
  if (d.empty()) throw DivisionNotExact("division by the zero polynomial");
  const unsigned j = static_cast<unsigned>(d.size() - 1);
  const BigRational c = d.back();
  // d must equal c * (1+x)^j coefficientwise.
  BigInteger binom = 1;
  for (unsigned i = 0; i <= j; ++i) {
    if (i > 0) binom = binom * (j - i + 1) / i;
    if (d[i] != c * BigRational(binom))
      throw DivisionNotExact("divisor is not of the form c*(1+x)^j");
  }
  RatFunc out(f.coeffs(), f.pole_order() + j);
  out /= c;
  return out;
}

std::string to_display(const RatFunc& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    const BigRational& q = f.coeffs()[i];
    if (sgn(q) == 0) continue;
    if (!first) os << (sgn(q) < 0 ? " - " : " + ");
    else if (sgn(q) < 0) os << "-";
    BigRational mag = abs(q);
    if (i == 0 || mag != 1) os << mag.get_str();
    if (i > 0) {
      if (mag != 1) os << "*";
      os << "x";
      if (i > 1) os << "^" << i;
    }
    first = false;
  }
  if (f.pole_order() == 0) return os.str();
  std::string out = "(" + os.str() + ")/(1+x)";
  if (f.pole_order() > 1) out += "^" + std::to_string(f.pole_order());
  return out;
}

LeadingOrder leading_order(std::span<const std::pair<long, double>> values) {
  if (values.size() < 2) throw OrderUndefined("ratio test needs at least two values");
  LeadingOrder out;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const auto [n0, f0] = values[i];
    const auto [n1, f1] = values[i + 1];
    if (f0 == 0.0 || f1 == 0.0 || !std::isfinite(f0) || !std::isfinite(f1))
      throw OrderUndefined("zero value at n = " + std::to_string(f0 == 0.0 ? n0 : n1));
    if (n1 <= n0) throw OrderUndefined("n sequence must be increasing");
    const double ratio = std::fabs(f0) / std::fabs(f1);
    out.ratios.push_back(ratio);
    out.exponents.push_back(std::log(ratio) / std::log(static_cast<double>(n1) / n0));
  }
  out.exponent = out.exponents.back();
  return out;
}

LeadingOrder rf_leading_order(std::span<const std::pair<long, RatFunc>> seq, double x0) {
  std::vector<std::pair<long, double>> values;
  values.reserve(seq.size());
  const BigRational xq = exact_rational(x0);
  for (const auto& [n, f] : seq) values.emplace_back(n, f(xq).get_d());
  return leading_order(values);
}

}  // namespace bko
