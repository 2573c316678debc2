// Writes a raw-input bundle generated by the reference model driven by the
// reference innovation sample, in the same CSV layouts as the historical sources.
#include "assetsim/errors.hpp"
#include "assetsim/reference.hpp"
#include "assetsim/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic raw-data bundle"};
    std::string out = "data/synthetic";
    std::uint64_t seed = assetsim::kReferenceSeed;
    app.add_option("--out", out, "Output directory");
    app.add_option("--seed", seed, "Seed for the innovation sample and daily paths");
    CLI11_PARSE(app, argc, argv);

    try {
        const assetsim::ModelSpec truth = assetsim::reference_model(seed);
        assetsim::SyntheticOptions options;
        options.seed = seed;
        const auto history = assetsim::simulate_history(truth, assetsim::reference_innovations(seed), options);
        assetsim::write_bundle(out, history.bundle);
        std::cout << "wrote " << out << "/manifest.json (" << history.bundle.daily_sp_close.size()
                  << " daily closes)\n";
    } catch (const assetsim::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const assetsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
