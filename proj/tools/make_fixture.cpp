#include "fixture.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic fixture corpus and query set", "make_fixture"};
    std::string out = "data/fixture";
    verifai::fixture::FixtureOptions options;
    app.add_option("--out", out, "Output directory");
    app.add_option("--seed", options.seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);
    try {
        auto f = verifai::fixture::make_fixture(options);
        verifai::fixture::write_fixture(f, out);
        std::cout << "wrote " << f.docs.size() << " documents and " << f.queries.size() << " queries to " << out
                  << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
