#include "cli.hpp"

#include "feedql/service.hpp"

#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

namespace {

std::atomic<feedql::HttpServer*> active{nullptr};

} // namespace

int main(int argc, char** argv)
{
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    std::thread([stop_signals] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        if (auto* server = active.load())
            server->stop();
        else
            std::_Exit(128 + sig);
    }).detach();

    std::vector<std::string> args(argv + 1, argv + argc);
    return feedql::cli::run(args, std::cout, std::cerr, [](feedql::HttpServer& s) { active = &s; });
}
