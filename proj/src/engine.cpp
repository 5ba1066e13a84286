#include "qcsolve/engine.hpp"

#include "qcsolve/error.hpp"
#include "qcsolve/eval.hpp"

namespace qcsolve::engine {

using backend::SolverResult;
using backend::Status;
using syntax::Query;
using syntax::Term;

std::string to_string(Answer a) {
  switch (a) {
    case Answer::Holds:
      return "Holds";
    case Answer::DoesNotHold:
      return "DoesNotHold";
    case Answer::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

std::string to_string(Reason r) {
  switch (r) {
    case Reason::ThetaValid:
      return "ThetaValid";
    case Reason::ThetaInvalid:
      return "ThetaInvalid";
    case Reason::SimPlusPsiValid:
      return "SimPlusPsiValid";
    case Reason::SimFailed:
      return "SimFailed";
    case Reason::PsiInvalid:
      return "PsiInvalid";
    case Reason::SolverUnknown:
      return "SolverUnknown";
    case Reason::BranchFailure:
      return "BranchFailure";
  }
  return "SolverUnknown";
}

namespace {

struct Session {
  explicit Session(const Config& c) : cfg(c) {}

  const Config& cfg;
  fol::Signature sig;
  int calls = 0;

  SolverResult run(const std::string& label, const fol::FormulaPtr& f) {
    if (cfg.on_formula) cfg.on_formula(label, *f, sig);
    auto script = backend::emit_smtlib(*f, sig);
    if (cfg.on_script) cfg.on_script(label, script);
    ++calls;
    return backend::run_script(script, cfg.solver);
  }
};

std::vector<Term> rv_terms(const syntax::Pattern& branch, const std::vector<Term>& dv) {
  auto vars = syntax::vars_of(branch);
  std::vector<Term> out;
  for (const auto& v : dv) {
    if (vars.count(v)) out.push_back(v);
  }
  return out;
}

fol::ConjunctiveForm form_of(const normalize::NormalizedQuery& n, size_t i, fol::Signature& sig) {
  return fol::conjunctive_form(n.branches[i], n.dv, n.from, n.from_named, sig);
}

Verdict check_inclusion(const Query& q1, const Query& q2, fol::Mode mode, const Config& cfg) {
  normalize::FreshNamer namer;
  auto n1 = normalize::normalize_query(q1, namer, cfg.branch_cap);
  auto n2 = normalize::normalize_query(q2, namer, cfg.branch_cap);
  // With projections in q2 containment is undecidable. The procedure still
  // runs, but only an evaluator-confirmed counterexample is reported.
  bool projected = mode == fol::Mode::Containment && !n2.projection_free();
  auto wmode = mode == fol::Mode::Containment ? backend::WitnessMode::Containment
                                              : backend::WitnessMode::Subsumption;
  Session s(cfg);
  std::vector<fol::ConjunctiveForm> f2;
  for (size_t j = 0; j < n2.branches.size(); ++j) f2.push_back(form_of(n2, j, s.sig));

  Verdict v;
  bool unknown = false;
  for (size_t i = 0; i < n1.branches.size(); ++i) {
    BranchLog log;
    log.index = static_cast<int>(i);
    int calls_before = s.calls;
    auto c1 = form_of(n1, i, s.sig);
    std::string tag = "branch " + std::to_string(i);

    auto th = s.run(tag + " theta", fol::theta(c1.phi, c1.rv));
    if (th.status == Status::Unsat) {
      log.answer = Answer::Holds;
      log.reason = Reason::ThetaValid;
    } else {
      std::optional<SolverResult> counter;
      bool branch_unknown = false;
      std::optional<SolverResult> single;
      for (size_t j = 0; j < f2.size() && !log.matched; ++j) {
        if (!fol::tilde(c1.rv, f2[j].rv, mode)) continue;
        log.compatible.push_back(static_cast<int>(j));
        auto r = s.run(tag + " psi " + std::to_string(j), fol::psi(c1.phi, c1.rv, {fol::phi(f2[j].sigma, c1.rv)}));
        if (r.status == Status::Unsat) {
          log.matched = static_cast<int>(j);
        } else {
          single = std::move(r);
        }
      }
      if (log.matched) {
        log.answer = Answer::Holds;
        log.reason = Reason::SimPlusPsiValid;
      } else if (log.compatible.empty()) {
        log.reason = Reason::SimFailed;
        if (th.status == Status::Sat) {
          counter = std::move(th);
        } else {
          branch_unknown = true;
        }
      } else {
        log.reason = Reason::PsiInvalid;
        SolverResult deciding;
        if (log.compatible.size() == 1) {
          deciding = std::move(*single);
        } else {
          // A Q1 solution may be covered by different Q2 branches on
          // different datasets, so try the disjunction as well.
          std::vector<fol::FormulaPtr> phis;
          for (int j : log.compatible) phis.push_back(fol::phi(f2[j].sigma, c1.rv));
          deciding = s.run(tag + " psi combined", fol::psi(c1.phi, c1.rv, phis));
        }
        if (deciding.status == Status::Unsat) {
          log.answer = Answer::Holds;
          log.reason = Reason::SimPlusPsiValid;
          log.matched = -1;
        } else if (deciding.status == Status::Sat) {
          counter = std::move(deciding);
        } else {
          branch_unknown = true;
        }
      }

      if (counter) {
        auto w = backend::extract_witness(*counter, s.sig, rv_terms(*n1.branches[i], n1.dv), q1,
                                          &q2, wmode);
        if (w.validated) {
          log.answer = Answer::DoesNotHold;
          v.witness = std::move(w);
        } else {
          ++v.witness_failures;
          branch_unknown = true;
        }
      }
      if (branch_unknown) {
        log.answer = Answer::Unknown;
        log.reason = Reason::SolverUnknown;
        unknown = true;
      }
    }
    log.solver_calls = s.calls - calls_before;
    v.branches.push_back(log);
    if (log.answer == Answer::DoesNotHold) {
      v.answer = Answer::DoesNotHold;
      v.failing_branch = static_cast<int>(i);
      v.reason = n1.branches.size() > 1 ? Reason::BranchFailure : log.reason;
      v.solver_calls = s.calls;
      return v;
    }
  }
  v.solver_calls = s.calls;
  if (projected) {
    throw ProjectionInSuperQuery(
        "containment is undecidable when the second query projects variables away; "
        "use subsumption instead");
  }
  if (unknown) {
    v.answer = Answer::Unknown;
    v.reason = Reason::SolverUnknown;
    return v;
  }
  v.answer = Answer::Holds;
  bool all_theta = true;
  for (const auto& b : v.branches) all_theta = all_theta && b.reason == Reason::ThetaValid;
  v.reason = all_theta ? Reason::ThetaValid : Reason::SimPlusPsiValid;
  return v;
}

}  // namespace

Verdict check_containment(const Query& q1, const Query& q2, const Config& cfg) {
  return check_inclusion(q1, q2, fol::Mode::Containment, cfg);
}

Verdict check_subsumption(const Query& q1, const Query& q2, const Config& cfg) {
  return check_inclusion(q1, q2, fol::Mode::Subsumption, cfg);
}

Verdict check_equivalence(const Query& q1, const Query& q2, const Config& cfg) {
  auto forward = check_containment(q1, q2, cfg);
  forward.direction = "forward";
  if (forward.answer == Answer::DoesNotHold) return forward;
  auto backward = check_containment(q2, q1, cfg);
  backward.direction = "backward";
  Verdict v = backward.answer == Answer::DoesNotHold ? backward : forward;
  v.solver_calls = forward.solver_calls + backward.solver_calls;
  v.witness_failures = forward.witness_failures + backward.witness_failures;
  v.branches = forward.branches;
  v.branches.insert(v.branches.end(), backward.branches.begin(), backward.branches.end());
  if (backward.answer == Answer::DoesNotHold) return v;
  if (forward.answer == Answer::Holds && backward.answer == Answer::Holds) {
    v.answer = Answer::Holds;
    v.reason = forward.reason == Reason::ThetaValid && backward.reason == Reason::ThetaValid
                   ? Reason::ThetaValid
                   : Reason::SimPlusPsiValid;
    v.direction.clear();
  } else {
    v.answer = Answer::Unknown;
    v.reason = Reason::SolverUnknown;
    v.direction = forward.answer == Answer::Unknown ? "forward" : "backward";
  }
  return v;
}

Verdict check_satisfiability(const Query& q1, const Config& cfg) {
  normalize::FreshNamer namer;
  auto n1 = normalize::normalize_query(q1, namer, cfg.branch_cap);
  Session s(cfg);
  Verdict v;
  bool unknown = false;
  for (size_t i = 0; i < n1.branches.size(); ++i) {
    BranchLog log;
    log.index = static_cast<int>(i);
    int before = s.calls;
    auto c1 = form_of(n1, i, s.sig);
    auto th = s.run("branch " + std::to_string(i) + " theta", fol::theta(c1.phi, c1.rv));
    if (th.status == Status::Unsat) {
      log.answer = Answer::DoesNotHold;
      log.reason = Reason::ThetaValid;
    } else if (th.status == Status::Sat) {
      auto w = backend::extract_witness(th, s.sig, rv_terms(*n1.branches[i], n1.dv), q1, nullptr,
                                        backend::WitnessMode::Satisfiability);
      if (w.validated) {
        log.answer = Answer::Holds;
        log.reason = Reason::ThetaInvalid;
        log.solver_calls = s.calls - before;
        v.branches.push_back(log);
        v.answer = Answer::Holds;
        v.reason = Reason::ThetaInvalid;
        v.witness = std::move(w);
        v.solver_calls = s.calls;
        return v;
      }
      ++v.witness_failures;
      unknown = true;
    } else {
      unknown = true;
    }
    log.solver_calls = s.calls - before;
    v.branches.push_back(log);
  }
  v.solver_calls = s.calls;
  v.answer = unknown ? Answer::Unknown : Answer::DoesNotHold;
  v.reason = unknown ? Reason::SolverUnknown : Reason::ThetaValid;
  return v;
}

}  // namespace qcsolve::engine
