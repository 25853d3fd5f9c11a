// Standalone mock chat-completions server for offline pipeline runs.

#include <atomic>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "mock_responder.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mock chat-completions server"};
    int port = 8089;
    int fail_first = 0;
    app.add_option("--port", port, "listen port");
    app.add_option("--fail-first", fail_first, "return 500 for the first N requests");
    CLI11_PARSE(app, argc, argv);

    std::atomic<int> requests{0};
    httplib::Server server;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                            httplib::Response& res) {
        int n = ++requests;
        if (n <= fail_first) {
            res.status = 500;
            return;
        }
        res.set_content(forge::mock::completion_body(req.body), "application/json");
    });

    std::cout << "mock LLM listening on port " << port << "\n";
    if (!server.listen("0.0.0.0", port)) {
        std::cerr << "failed to bind port " << port << "\n";
        return 1;
    }
    return 0;
}
