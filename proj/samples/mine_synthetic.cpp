// Plants A -> B in a random sequence over {A..E} and mines it back.
//
//   mine_synthetic [seed] [ip]
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "cossu/cossu.hpp"

int main(int argc, char** argv) {
    auto spec = cossu::SyntheticSpec::standard(argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7);
    if (argc > 2) spec.insertion_probability = std::atof(argv[2]);
    const cossu::Sequence seq = cossu::synth_generate(spec);

    const auto start = std::chrono::steady_clock::now();
    const auto result = cossu::cossu_mine_detailed(spec.alphabet, seq);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::cout << "closed patterns:   " << result.stats.closed_patterns << "\n"
              << "generated rules:   " << result.stats.generated_candidates << "\n"
              << "positive-gain:     " << result.stats.positive_candidates << "\n"
              << "accepted / pruned: " << result.stats.accepted << " / " << result.stats.pruned << "\n"
              << "total bits:        " << result.report.total() << "\n"
              << "seconds:           " << secs << "\n";
    for (std::size_t i = result.model.alphabet_size(); i < result.model.size(); ++i)
        std::cout << "  " << cossu::to_string(spec.alphabet, result.model.rules()[i]) << "  w="
                  << cossu::format_weight(result.model.weight(i), result.model.precision()) << "\n";
}
