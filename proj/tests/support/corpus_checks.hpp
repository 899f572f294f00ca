#pragma once

#include <string>
#include <vector>

namespace testing_support {

struct ChartFixture {
    std::string file;
    std::string kind;
    int chains = 0;
    int prebound = 0;
    std::string code;
};

std::vector<ChartFixture> chart_corpus();

// True when processed equals original plus whole inserted data-binding calls,
// compared token by token. `insertions` receives the number of inserted calls.
bool only_insertions_changed(const std::string& original, const std::string& processed, int& insertions);

struct CheckReport {
    std::size_t cases = 0;
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

// Chain counts, one data attribute per chain, idempotence, token diff and
// tag round-trip over every chart fixture.
CheckReport check_chart_corpus();

struct ResponseFixture {
    std::string file;
    std::string expectedClass; // empty for "no failure"
    bool expectWarning = false;
    std::string raw;
};

std::vector<ResponseFixture> response_corpus();

// Every malformed response lands in its expected class without throwing.
CheckReport check_failure_taxonomy();

} // namespace testing_support
