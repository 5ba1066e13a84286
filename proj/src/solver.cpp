#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "qcsolve/backend.hpp"
#include "qcsolve/error.hpp"

extern char** environ;

namespace qcsolve::backend {

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

SolverConfig default_solver_config() {
  SolverConfig cfg;
  if (const char* env = std::getenv("QCSOLVE_SOLVER"); env && *env) {
    cfg.command = split_command(env);
  }
  return cfg;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Sat:
      return "sat";
    case Status::Unsat:
      return "unsat";
    case Status::Unknown:
      return "unknown";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Subprocess

namespace {

struct ProcessOutput {
  std::string out;
  bool timed_out = false;
};

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

ProcessOutput run_process(const std::vector<std::string>& cmd, const std::string& input,
                          std::chrono::milliseconds timeout) {
  if (cmd.empty()) throw SolverNotFound("empty solver command");
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0) {
    throw SolverProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, in_pipe[0], 0);
  posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 1);
  posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 2);
  std::vector<char*> argv;
  for (const auto& a : cmd) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid;
  int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw SolverNotFound("cannot start solver '" + cmd[0] + "': " + std::strerror(rc));
  }

  // A solver that dies early must not kill us with SIGPIPE.
  signal(SIGPIPE, SIG_IGN);
  set_nonblocking(in_pipe[1]);
  set_nonblocking(out_pipe[0]);
  ProcessOutput res;
  size_t written = 0;
  int in_fd = in_pipe[1];
  if (input.empty()) {
    close(in_fd);
    in_fd = -1;
  }
  auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      res.timed_out = true;
      break;
    }
    pollfd fds[2];
    int n = 0;
    fds[n++] = {out_pipe[0], POLLIN, 0};
    if (in_fd >= 0) fds[n++] = {in_fd, POLLOUT, 0};
    int pr = poll(fds, n, static_cast<int>(left.count()));
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (in_fd >= 0 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = write(in_fd, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written == input.size()) {
        close(in_fd);
        in_fd = -1;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t r = read(out_pipe[0], buf, sizeof buf);
      if (r > 0) {
        res.out.append(buf, static_cast<size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        break;
      }
    }
  }
  if (in_fd >= 0) close(in_fd);
  close(out_pipe[0]);
  if (res.timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// S-expressions

std::vector<Sexp> parse_sexps(std::string_view text) {
  std::vector<Sexp> stack(1);
  stack[0].is_atom = false;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      Sexp s;
      s.is_atom = false;
      stack.push_back(std::move(s));
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) throw SolverProtocolError("unbalanced ')' in solver output");
      Sexp done = std::move(stack.back());
      stack.pop_back();
      stack.back().list.push_back(std::move(done));
      ++i;
    } else {
      Sexp a;
      if (c == '|') {
        size_t end = text.find('|', i + 1);
        if (end == std::string_view::npos) throw SolverProtocolError("unterminated |symbol|");
        a.atom = std::string(text.substr(i + 1, end - i - 1));
        i = end + 1;
      } else if (c == '"') {
        size_t j = i + 1;
        while (j < text.size() && !(text[j] == '"' && (j + 1 >= text.size() || text[j + 1] != '"')))
          j += text[j] == '"' ? 2 : 1;
        a.atom = std::string(text.substr(i, j + 1 - i));
        i = j + 1;
      } else {
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
               text[j] != '(' && text[j] != ')' && text[j] != ';')
          ++j;
        a.atom = std::string(text.substr(i, j - i));
        i = j;
      }
      stack.back().list.push_back(std::move(a));
    }
  }
  if (stack.size() != 1) throw SolverProtocolError("unbalanced '(' in solver output");
  return std::move(stack[0].list);
}

// ---------------------------------------------------------------------------
// Models

std::optional<Model> Model::from_sexp(const Sexp& model) {
  if (model.is_atom) return std::nullopt;
  Model m;
  // Some solvers wrap the definitions as (model ...).
  size_t start = !model.list.empty() && model.list[0].is_atom && model.list[0].atom == "model";
  for (size_t k = start; k < model.list.size(); ++k) {
    const Sexp& d = model.list[k];
    if (d.is_atom || d.list.empty() || !d.list[0].is_atom) continue;
    const auto& head = d.list[0].atom;
    if (head == "declare-fun" && d.list.size() == 4 && !d.list[2].is_atom &&
        d.list[2].list.empty() && d.list[3].is_atom && d.list[3].atom == "U") {
      m.universe_.push_back(d.list[1].atom);
    } else if (head == "define-fun" && d.list.size() == 5 && !d.list[2].is_atom) {
      Fun f;
      for (const auto& p : d.list[2].list) {
        if (p.is_atom || p.list.empty()) return std::nullopt;
        f.params.push_back(p.list[0].atom);
      }
      f.body = d.list[4];
      m.funs_[d.list[1].atom] = std::move(f);
    }
  }
  return m;
}

Model::Value Model::call(const std::string& name, const std::vector<Value>& args,
                         int depth) const {
  auto it = funs_.find(name);
  if (it == funs_.end()) {
    // Universe elements denote themselves.
    Value v;
    v.elem = name;
    return v;
  }
  const Fun& f = it->second;
  if (f.params.size() != args.size()) throw SolverProtocolError("arity mismatch for " + name);
  Env env;
  for (size_t i = 0; i < args.size(); ++i) env[f.params[i]] = args[i];
  return eval(f.body, env, depth + 1);
}

Model::Value Model::eval(const Sexp& e, const Env& env, int depth) const {
  if (depth > 200) throw SolverProtocolError("model definitions nest too deeply");
  Value v;
  if (e.is_atom) {
    if (auto it = env.find(e.atom); it != env.end()) return it->second;
    if (e.atom == "true" || e.atom == "false") {
      v.is_bool = true;
      v.b = e.atom == "true";
      return v;
    }
    return call(e.atom, {}, depth);
  }
  if (e.list.empty()) throw SolverProtocolError("empty application in model");
  const Sexp& head = e.list[0];
  if (!head.is_atom) {
    // (as elem U) and similar annotations.
    throw SolverProtocolError("unsupported model term");
  }
  const std::string& op = head.atom;
  auto arg = [&](size_t i) { return eval(e.list.at(i), env, depth + 1); };
  v.is_bool = true;
  if (op == "and" || op == "or") {
    bool is_and = op == "and";
    v.b = is_and;
    for (size_t i = 1; i < e.list.size(); ++i) {
      if (arg(i).b != is_and) {
        v.b = !is_and;
        break;
      }
    }
    return v;
  }
  if (op == "not") {
    v.b = !arg(1).b;
    return v;
  }
  if (op == "=>") {
    v.b = !arg(1).b || arg(2).b;
    return v;
  }
  if (op == "ite") return arg(1).b ? arg(2) : arg(3);
  if (op == "=" || op == "distinct") {
    std::vector<Value> xs;
    for (size_t i = 1; i < e.list.size(); ++i) xs.push_back(arg(i));
    auto same = [](const Value& a, const Value& b) {
      return a.is_bool ? a.b == b.b : a.elem == b.elem;
    };
    if (op == "=") {
      v.b = true;
      for (size_t i = 1; i < xs.size(); ++i) v.b = v.b && same(xs[0], xs[i]);
    } else {
      v.b = true;
      for (size_t i = 0; i < xs.size(); ++i)
        for (size_t j = i + 1; j < xs.size(); ++j) v.b = v.b && !same(xs[i], xs[j]);
    }
    return v;
  }
  if (op == "let") {
    Env inner = env;
    for (const auto& b : e.list.at(1).list) inner[b.list.at(0).atom] = eval(b.list.at(1), env, depth + 1);
    return eval(e.list.at(2), inner, depth + 1);
  }
  if (op == "as") return arg(1);
  std::vector<Value> args;
  for (size_t i = 1; i < e.list.size(); ++i) args.push_back(arg(i));
  return call(op, args, depth);
}

std::optional<std::string> Model::constant(const std::string& name) const {
  if (!funs_.count(name)) return std::nullopt;
  auto v = call(name, {}, 0);
  if (v.is_bool) return std::nullopt;
  return v.elem;
}

bool Model::holds(const std::string& pred, const std::vector<std::string>& args) const {
  if (!funs_.count(pred)) return false;
  std::vector<Value> vs;
  for (const auto& a : args) vs.push_back(Value{false, false, a});
  return call(pred, vs, 0).b;
}

std::optional<std::string> Model::apply(const std::string& fn,
                                        const std::vector<std::string>& args) const {
  if (!funs_.count(fn)) return std::nullopt;
  std::vector<Value> vs;
  for (const auto& a : args) vs.push_back(Value{false, false, a});
  auto v = call(fn, vs, 0);
  if (v.is_bool) return std::nullopt;
  return v.elem;
}

// ---------------------------------------------------------------------------
// Solver driver

SolverResult run_script(const SmtScript& script, const SolverConfig& cfg) {
  SolverResult res;
  res.script = script;
  auto proc = run_process(cfg.command, script.text, cfg.timeout);
  res.output = proc.out;
  if (proc.timed_out) return res;
  auto sexps = parse_sexps(proc.out);
  size_t i = 0;
  // Skip option acknowledgements such as "success".
  while (i < sexps.size() && sexps[i].is_atom && sexps[i].atom == "success") ++i;
  if (i == sexps.size() || !sexps[i].is_atom) {
    throw SolverProtocolError("no check-sat answer in solver output: " + proc.out.substr(0, 200));
  }
  const std::string& answer = sexps[i].atom;
  if (answer == "unsat") {
    res.status = Status::Unsat;
  } else if (answer == "sat") {
    res.status = Status::Sat;
    if (i + 1 < sexps.size()) res.model = Model::from_sexp(sexps[i + 1]);
  } else if (answer == "unknown" || answer == "timeout") {
    res.status = Status::Unknown;
  } else {
    throw SolverProtocolError("unexpected solver answer: " + answer);
  }
  return res;
}

SolverResult check_validity(const fol::Formula& f, fol::Signature& sig, const SolverConfig& cfg) {
  return run_script(emit_smtlib(f, sig), cfg);
}

}  // namespace qcsolve::backend
