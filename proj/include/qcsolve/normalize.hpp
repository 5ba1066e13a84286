#pragma once

#include <string>
#include <vector>

#include "qcsolve/syntax.hpp"

namespace qcsolve::normalize {

// Filters that mention a variable their branch can never bind have that
// variable replaced by datatype(<kUnboundIri>), which always evaluates to err.
inline constexpr std::string_view kUnboundIri = "urn:qcsolve:unbound";
inline constexpr size_t kDefaultBranchCap = 256;

class FreshNamer {
 public:
  syntax::Term fresh();
  int issued() const { return next_; }

 private:
  int next_ = 0;
};

bool is_well_designed(const syntax::Pattern& gp);

// Rewrites every optional as (gp1 . gp2) union (gp1 diff gp2), innermost
// first. Throws NotWellDesigned.
syntax::PatternPtr eliminate_optional(const syntax::PatternPtr& gp);

// Union-free branches whose union is equivalent to gp. Throws
// BlowupLimitExceeded when more than `cap` branches arise.
std::vector<syntax::PatternPtr> to_simple_normal_form(
    const syntax::PatternPtr& gp, size_t cap = kDefaultBranchCap);

syntax::PatternPtr to_filter_normal_form(const syntax::PatternPtr& gp);

syntax::Query rename_nondistinguished(const syntax::Query& q, FreshNamer& namer);

syntax::Query eliminate_subqueries(const syntax::Query& q, FreshNamer& namer);

struct NormalizedQuery {
  std::vector<syntax::Term> dv;
  std::vector<std::string> from;
  std::vector<std::string> from_named;
  std::vector<syntax::PatternPtr> branches;

  // Every branch binds only distinguished variables.
  bool projection_free() const;
  syntax::VarSet dv_set() const { return {dv.begin(), dv.end()}; }
  // Reassembles the branches with union (for printing and checking).
  syntax::Query to_query() const;
};

NormalizedQuery normalize_query(const syntax::Query& q, FreshNamer& namer,
                                size_t cap = kDefaultBranchCap);

}  // namespace qcsolve::normalize
