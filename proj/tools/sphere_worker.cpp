// Reference worker for the external objective protocol: evaluates the
// unshifted sphere function. Fault modes exist for exercising the
// harness's error handling.

#include "dacopt/core.hpp"
#include "dacopt/objectives.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"sphere worker speaking the dacopt line protocol"};
    std::size_t dim = 2;
    std::string fault = "none";
    std::size_t fault_after = 0;
    app.add_option("--dim", dim, "dimension announced in READY")->check(CLI::PositiveNumber);
    app.add_option("--fault", fault, "none | garbage | crash | hang | wrong-id | bad-ready")
        ->check(CLI::IsMember({"none", "garbage", "crash", "hang", "wrong-id", "bad-ready"}));
    app.add_option("--fault-after", fault_after, "number of good replies before the fault");
    CLI11_PARSE(app, argc, argv);

    std::ios::sync_with_stdio(false);
    std::string line;
    std::size_t served = 0;
    while (std::getline(std::cin, line)) {
        if (line == "HELLO dacopt 1") {
            if (fault == "bad-ready")
                std::cout << "READY " << dim + 1 << std::endl;
            else
                std::cout << "READY " << dim << std::endl;
            continue;
        }
        if (line == "BYE") return 0;

        std::istringstream in(line);
        std::string verb;
        std::string id;
        in >> verb >> id;
        if (verb != "EVAL") {
            std::cerr << "unexpected request: " << line << "\n";
            return 1;
        }
        std::vector<double> x;
        std::string token;
        while (in >> token) x.push_back(dacopt::parse_double(token));

        if (served >= fault_after && fault != "none") {
            if (fault == "garbage") {
                std::cout << "garbage" << std::endl;
                continue;
            }
            if (fault == "crash") std::_Exit(7);
            if (fault == "hang") {
                for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
            }
            if (fault == "wrong-id") id += "0";
        }
        std::cout << "RESULT " << id << ' ' << dacopt::format_double(dacopt::sphere(x)) << std::endl;
        ++served;
    }
    return 0;
}
