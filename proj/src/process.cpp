#include "genrecon/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <thread>
#include <utility>

namespace genrecon {

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

bool make_pipe(Fd& read_end, Fd& write_end) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) return false;
  read_end = Fd(fds[0]);
  write_end = Fd(fds[1]);
  return true;
}

// Kills the child's process group when the deadline passes unless cancelled.
class Watchdog {
 public:
  Watchdog(pid_t pgid, std::chrono::milliseconds timeout)
      : thread_([this, pgid, timeout] {
          std::unique_lock lock(mutex_);
          if (!cv_.wait_for(lock, timeout, [this] { return cancelled_; })) {
            fired_ = true;
            ::kill(-pgid, SIGKILL);
          }
        }) {}

  ~Watchdog() { cancel(); }

  void cancel() {
    {
      std::lock_guard lock(mutex_);
      cancelled_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

  bool fired() const { return fired_; }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  bool cancelled_ = false;
  std::atomic<bool> fired_{false};
  std::thread thread_;
};

}  // namespace

std::vector<std::string> resolve_worker_command(std::vector<std::string> argv) {
  if (argv.empty() || argv[0].find('/') != std::string::npos) return argv;
  const char* dir = std::getenv(kWorkerDirEnv);
  if (dir == nullptr || *dir == '\0') return argv;
  const std::filesystem::path candidate = std::filesystem::path(dir) / argv[0];
  if (::access(candidate.c_str(), X_OK) == 0) argv[0] = candidate.string();
  return argv;
}

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& stdin_text,
                          std::chrono::milliseconds timeout) {
  ProcessResult result;
  if (argv.empty()) {
    result.spawn_error = "empty command line";
    return result;
  }
  ignore_sigpipe_once();

  Fd in_r, in_w, out_r, out_w, err_r, err_w;
  if (!make_pipe(in_r, in_w) || !make_pipe(out_r, out_w) || !make_pipe(err_r, err_w)) {
    result.spawn_error = std::string("pipe: ") + std::strerror(errno);
    return result;
  }

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    result.spawn_error = std::string("fork: ") + std::strerror(errno);
    return result;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::signal(SIGPIPE, SIG_DFL);
    ::dup2(in_r.get(), STDIN_FILENO);
    ::dup2(out_w.get(), STDOUT_FILENO);
    ::execvp(cargv[0], cargv.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(err_w.get(), &err, sizeof err);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  in_r.reset();
  out_w.reset();
  err_w.reset();

  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(err_r.get(), &exec_errno, sizeof exec_errno);
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    result.spawn_error = argv[0] + ": " + std::strerror(exec_errno);
    return result;
  }
  result.spawned = true;

  Watchdog watchdog(pid, timeout);

  const char* p = stdin_text.data();
  std::size_t left = stdin_text.size();
  while (left > 0) {
    const ssize_t n = ::write(in_w.get(), p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;  // worker closed its input early; its response decides the outcome
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  in_w.reset();

  char buf[4096];
  for (;;) {
    const ssize_t n = ::read(out_r.get(), buf, sizeof buf);
    if (n > 0) {
      result.stdout_text.append(buf, static_cast<std::size_t>(n));
    } else if (n < 0 && errno == EINTR) {
      continue;
    } else {
      break;
    }
  }

  // Wait without reaping so the process group id stays valid for the
  // watchdog until it is cancelled.
  siginfo_t info{};
  while (::waitid(P_PID, static_cast<id_t>(pid), &info, WEXITED | WNOWAIT) != 0 && errno == EINTR) {
  }
  watchdog.cancel();
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.timed_out = watchdog.fired();
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.term_signal = WTERMSIG(status);
  return result;
}

}  // namespace genrecon
