#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "bko/basis.hpp"
#include "bko/rational.hpp"

namespace bko {

enum class MomentFamily {
  upsilon,  // B*(t^r)
  mu,       // B*((t-x)^r)
  mu_star,  // sum W (k/n - x)^r
  T,        // K(t^r)
  u,        // K((t-x)^r)
};

std::string_view to_string(MomentFamily family);
MomentFamily parse_family(std::string_view name);

struct MomentTable {
  ExactParams params;
  MomentFamily family = MomentFamily::upsilon;
  std::vector<RatFunc> entries;  // indexed by order r

  const RatFunc& operator[](std::size_t r) const { return entries.at(r); }
  unsigned r_max() const { return static_cast<unsigned>(entries.size()) - 1; }
  nlohmann::json to_json() const;
};

MomentTable upsilon_sym(unsigned r_max, const ExactParams& p);
MomentTable mu_sym(unsigned r_max, const ExactParams& p);
MomentTable mu_star_sym(unsigned r_max, const ExactParams& p);
MomentTable kantorovich_moment_sym(unsigned r_max, const ExactParams& p);
MomentTable kantorovich_central_sym(unsigned r_max, const ExactParams& p);
MomentTable moment_table(MomentFamily family, unsigned r_max, const ExactParams& p);

// gamma_n^a = u_{n,2} + (-x + ax/(1+x) + 1/2)^2 / (n+1)^2
RatFunc gamma_sym(const ExactParams& p);

// Closed forms printed alongside the recurrences; used as golden values.
namespace closed_form {
RatFunc upsilon1(const ExactParams& p);
RatFunc mu1(const ExactParams& p);
RatFunc T1(const ExactParams& p);
RatFunc T2(const ExactParams& p);
RatFunc u1(const ExactParams& p);
RatFunc u2(const ExactParams& p);
RatFunc gamma(const ExactParams& p);
}  // namespace closed_form

// Tables keyed by (n, a, family). A request for a larger r_max replaces the
// cached table. Thread-safe; returned tables are immutable.
class MomentCache {
 public:
  std::shared_ptr<const MomentTable> get(MomentFamily family, unsigned r_max, const ExactParams& p);
  void clear();

 private:
  using Key = std::tuple<std::string, std::string, int>;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const MomentTable>> tables_;
};

MomentCache& moment_cache();

}  // namespace bko
