#include "szzkit/common/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <csignal>
#include <cerrno>
#include <cstring>
#include <stdexcept>

extern char** environ;

namespace szzkit {
namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fds, O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;
  int read_end() const { return fds[0]; }
  int write_end() const { return fds[1]; }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input,
                          const std::filesystem::path& cwd) {
  if (argv.empty()) throw std::invalid_argument("run_process: empty argv");
  static const bool sigpipe_ignored = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;
  Pipe in, out, err;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.read_end(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.write_end(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write_end(), STDERR_FILENO);

  // posix_spawn has no portable chdir action on glibc 2.35; route through git -C or env instead.
  std::vector<std::string> args = argv;
  if (!cwd.empty()) {
    args.insert(args.begin(), {"env", "-C", cwd.string()});
  }
  std::vector<char*> cargv;
  cargv.reserve(args.size() + 1);
  for (auto& a : args) cargv.push_back(a.data());
  cargv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("cannot spawn " + argv[0] + ": " + std::strerror(rc));

  in.close_read();
  out.close_write();
  err.close_write();
  if (input.empty()) in.close_write();

  ProcessResult result;
  std::size_t written = 0;
  std::array<char, 65536> buffer{};
  while (out.read_end() >= 0 || err.read_end() >= 0 || in.write_end() >= 0) {
    std::array<pollfd, 3> pfds{};
    nfds_t n = 0;
    int* owners[3];
    auto add = [&](Pipe& p, bool writing, short events) {
      const int fd = writing ? p.write_end() : p.read_end();
      if (fd < 0) return;
      pfds[n] = pollfd{fd, events, 0};
      owners[n] = writing ? &p.fds[1] : &p.fds[0];
      ++n;
    };
    add(out, false, POLLIN);
    add(err, false, POLLIN);
    add(in, true, POLLOUT);
    if (::poll(pfds.data(), n, -1) < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("poll: ") + std::strerror(errno));
    }
    for (nfds_t i = 0; i < n; ++i) {
      if (pfds[i].revents == 0) continue;
      if (pfds[i].fd == in.write_end()) {
        const ssize_t w = ::write(pfds[i].fd, input.data() + written, input.size() - written);
        if (w > 0) written += static_cast<std::size_t>(w);
        if (w < 0 && errno != EAGAIN && errno != EINTR) written = input.size();
        if (written >= input.size()) in.close_write();
        continue;
      }
      const ssize_t r = ::read(pfds[i].fd, buffer.data(), buffer.size());
      if (r > 0) {
        (pfds[i].fd == out.read_end() ? result.out : result.err).append(buffer.data(), static_cast<std::size_t>(r));
      } else if (r == 0 || (errno != EAGAIN && errno != EINTR)) {
        ::close(*owners[i]);
        *owners[i] = -1;
      }
    }
  }

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw std::runtime_error(std::string("waitpid: ") + std::strerror(errno));
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

}  // namespace szzkit
