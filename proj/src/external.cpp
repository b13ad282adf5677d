#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "satfactor/solver.hpp"

namespace satfactor::solver {

namespace {

using Clock = std::chrono::steady_clock;

class TempFile {
 public:
  TempFile() {
    std::string pattern = (std::filesystem::temp_directory_path() / "satfactor-XXXXXX.cnf").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    int fd = ::mkstemps(buf.data(), 4);
    if (fd < 0) throw ExternalSolverError(ExternalErrorKind::Io, "cannot create temporary instance file");
    ::close(fd);
    path_ = buf.data();
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string build_command(const std::string& cmd_template, const std::string& path) {
  auto at = cmd_template.find("{}");
  if (at == std::string::npos) return cmd_template + " " + shell_quote(path);
  std::string cmd = cmd_template;
  cmd.replace(at, 2, shell_quote(path));
  return cmd;
}

struct ChildOutcome {
  std::string stdout_text;
  int exit_code = -1;
  bool timed_out = false;
};

ChildOutcome run_child(const std::string& command, double time_limit) {
  int pipe_fds[2];
  if (::pipe(pipe_fds) != 0) throw ExternalSolverError(ExternalErrorKind::Spawn, "pipe() failed");

  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    throw ExternalSolverError(ExternalErrorKind::Spawn, "fork() failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(pipe_fds[1]);

  ChildOutcome outcome;
  auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(time_limit));
  char buf[4096];
  bool open = true;
  while (open) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) {
      outcome.timed_out = true;
      break;
    }
    pollfd pfd{pipe_fds[0], POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 100)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    ssize_t n = ::read(pipe_fds[0], buf, sizeof buf);
    if (n > 0) {
      outcome.stdout_text.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      open = false;
    }
  }
  ::close(pipe_fds[0]);

  if (outcome.timed_out) ::kill(-pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) outcome.exit_code = WEXITSTATUS(status);
  return outcome;
}

}  // namespace

SolveResult solve_external(const std::string& cmd_template, const cnf::Formula& f, double time_limit) {
  TempFile instance;
  {
    std::ofstream out(instance.path());
    out << cnf::write_dimacs(f);
    if (!out) throw ExternalSolverError(ExternalErrorKind::Io, "cannot write " + instance.path());
  }

  auto start = Clock::now();
  ChildOutcome child = run_child(build_command(cmd_template, instance.path()), time_limit);
  SolveResult result;
  result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  if (child.timed_out) return result;

  cnf::SolverOutput parsed = cnf::parse_solver_output(child.stdout_text);
  if (parsed.status == SolveStatus::Unknown && child.exit_code == 127) {
    throw ExternalSolverError(ExternalErrorKind::Spawn, "could not run solver command '" + cmd_template + "'");
  }
  if (parsed.status == SolveStatus::Unknown && child.exit_code != 0 && child.exit_code != 10 &&
      child.exit_code != 20) {
    throw ExternalSolverError(ExternalErrorKind::Unparseable,
                              "solver exited with code " + std::to_string(child.exit_code) +
                                  " and produced no recognisable result");
  }
  result.status = parsed.status;
  if (parsed.status == SolveStatus::Sat) {
    // Variables missing from the v-lines default to false.
    cnf::Assignment model(f.num_vars);
    for (std::uint32_t v = 1; v <= f.num_vars; ++v) {
      cnf::Value value = parsed.assignment.get(cnf::Var(v));
      model.set(cnf::Var(v), value == cnf::Value::True);
    }
    if (!cnf::evaluate(f, model)) {
      throw ExternalSolverError(ExternalErrorKind::Unparseable, "solver reported a model that violates the formula");
    }
    result.assignment = std::move(model);
  }
  return result;
}

}  // namespace satfactor::solver
