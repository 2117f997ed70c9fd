#include <atomic>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "finsler/parallel.hpp"

using namespace finsler;

TEST_CASE("parallel_for visits every index once") {
    for (int jobs : {1, 2, 7}) {
        std::vector<std::atomic<int>> hits(100);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, jobs);
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    parallel_for(0, [](std::size_t) { FAIL("called"); }, 4);
}

TEST_CASE("nested calls run serially") {
    std::atomic<int> total{0};
    parallel_for(
        4,
        [&](std::size_t) {
            parallel_for(10, [&](std::size_t) { total++; }, 4);
        },
        4);
    CHECK(total.load() == 40);
}

TEST_CASE("the lowest failing index is rethrown") {
    try {
        parallel_for(
            50,
            [](std::size_t i) {
                if (i == 13 || i == 31) throw std::runtime_error("index " + std::to_string(i));
            },
            4);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "index 13");
    }
}

TEST_CASE("default worker count") {
    CHECK(default_jobs() >= 1);
    set_default_jobs(3);
    CHECK(default_jobs() == 3);
    set_default_jobs(1);
}
