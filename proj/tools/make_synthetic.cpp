// Writes the bundled synthetic corpus: make_synthetic <per_class> <seed> > out.csv

#include "hybridclf/synthetic.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    const std::size_t per_class = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
    std::cout << hybridclf::corpus_to_csv(hybridclf::synthetic_corpus(per_class, seed));
    return 0;
}
