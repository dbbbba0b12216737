#pragma once

namespace etd::detail {

struct LebedevGenerator {
    int type;
    double a, b, v;
};

struct LebedevRuleInfo {
    int order;
    int points;
    int first;
    int count;
};

extern const LebedevGenerator kLebedevGenerators[];
extern const LebedevRuleInfo kLebedevRules[];
extern const int kLebedevRuleCount;

}  // namespace etd::detail
