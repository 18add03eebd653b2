#pragma once

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

extern char** environ;

namespace testsupport {

// A child process with stdout and stderr drained into buffers by reader
// threads, so long-running children never block on a full pipe.
class Subprocess {
public:
    // argv[0] is the executable path; extra_env entries are "KEY=VALUE".
    explicit Subprocess(std::vector<std::string> argv,
                        std::vector<std::string> extra_env = {})
        : argv_(std::move(argv)), env_(std::move(extra_env)) {
        int out_pipe[2];
        int err_pipe[2];
        if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) return;

        std::vector<char*> argvp;
        for (std::string& arg : argv_) argvp.push_back(arg.data());
        argvp.push_back(nullptr);
        std::vector<char*> envp;
        for (char** e = environ; *e != nullptr; ++e) envp.push_back(*e);
        for (std::string& kv : env_) envp.push_back(kv.data());
        envp.push_back(nullptr);

        pid_ = ::fork();
        if (pid_ == 0) {
            ::dup2(out_pipe[1], 1);
            ::dup2(err_pipe[1], 2);
            ::close(out_pipe[0]);
            ::close(out_pipe[1]);
            ::close(err_pipe[0]);
            ::close(err_pipe[1]);
            ::execve(argvp[0], argvp.data(), envp.data());
            _exit(127);
        }
        ::close(out_pipe[1]);
        ::close(err_pipe[1]);
        out_reader_ = std::thread([this, fd = out_pipe[0]] { drain(fd, out_); });
        err_reader_ = std::thread([this, fd = err_pipe[0]] { drain(fd, err_); });
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    ~Subprocess() {
        if (pid_ > 0 && !reaped_) {
            ::kill(pid_, SIGKILL);
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
        if (out_reader_.joinable()) out_reader_.join();
        if (err_reader_.joinable()) err_reader_.join();
    }

    pid_t pid() const { return pid_; }

    void send_signal(int sig) {
        if (pid_ > 0 && !reaped_) ::kill(pid_, sig);
    }

    // Exit code if the child finished within the limit (128+signal when
    // killed by one), otherwise nullopt with the child still running.
    std::optional<int> wait_exit(std::chrono::milliseconds limit) {
        if (pid_ <= 0) return 127;
        if (reaped_) return exit_code_;
        auto deadline = std::chrono::steady_clock::now() + limit;
        for (;;) {
            int status = 0;
            pid_t got = ::waitpid(pid_, &status, WNOHANG);
            if (got == pid_) {
                reaped_ = true;
                exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status)
                                               : 128 + WTERMSIG(status);
                return exit_code_;
            }
            if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    }

    std::string out() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return out_;
    }
    std::string err() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return err_;
    }

private:
    void drain(int fd, std::string& sink) {
        char buffer[4096];
        for (;;) {
            ssize_t n = ::read(fd, buffer, sizeof buffer);
            if (n <= 0) break;
            std::lock_guard<std::mutex> lock(mutex_);
            sink.append(buffer, static_cast<std::size_t>(n));
        }
        ::close(fd);
    }

    std::vector<std::string> argv_;
    std::vector<std::string> env_;
    pid_t pid_ = -1;
    bool reaped_ = false;
    int exit_code_ = -1;
    mutable std::mutex mutex_;
    std::string out_;
    std::string err_;
    std::thread out_reader_;
    std::thread err_reader_;
};

struct RunResult {
    int exit_code;  // -1 when the deadline passed and the child was killed
    std::string out;
    std::string err;
};

inline RunResult run(std::vector<std::string> argv, std::vector<std::string> extra_env = {},
                     std::chrono::milliseconds limit = std::chrono::milliseconds(30000)) {
    Subprocess child(std::move(argv), std::move(extra_env));
    std::optional<int> code = child.wait_exit(limit);
    if (!code.has_value()) {
        child.send_signal(SIGKILL);
        child.wait_exit(std::chrono::milliseconds(2000));
    }
    // Give the readers a moment to pull the tail of each pipe.
    for (int i = 0; i < 100; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        std::string before = child.out() + child.err();
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        if (before == child.out() + child.err()) break;
    }
    return RunResult{code.value_or(-1), child.out(), child.err()};
}

}  // namespace testsupport
