#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace fictsense {

inline constexpr int kNumSupersenses = 40;

// Canonical 40-category inventory: the 25 WordNet noun lexicographer
// files (noun.Tops excluded) followed by the 15 verb files, each block
// alphabetical. The index order below is the feature order everywhere:
// in feature vectors, CSV exports, model files, and reports.
inline constexpr std::array<std::string_view, kNumSupersenses> kSupersenses = {
    "noun.act",           // 0
    "noun.animal",        // 1
    "noun.artifact",      // 2
    "noun.attribute",     // 3
    "noun.body",          // 4
    "noun.cognition",     // 5
    "noun.communication", // 6
    "noun.event",         // 7
    "noun.feeling",       // 8
    "noun.food",          // 9
    "noun.group",         // 10
    "noun.location",      // 11
    "noun.motive",        // 12
    "noun.object",        // 13
    "noun.person",        // 14
    "noun.phenomenon",    // 15
    "noun.plant",         // 16
    "noun.possession",    // 17
    "noun.process",       // 18
    "noun.quantity",      // 19
    "noun.relation",      // 20
    "noun.shape",         // 21
    "noun.state",         // 22
    "noun.substance",     // 23
    "noun.time",          // 24
    "verb.body",          // 25
    "verb.change",        // 26
    "verb.cognition",     // 27
    "verb.communication", // 28
    "verb.competition",   // 29
    "verb.consumption",   // 30
    "verb.contact",       // 31
    "verb.creation",      // 32
    "verb.emotion",       // 33
    "verb.motion",        // 34
    "verb.perception",    // 35
    "verb.possession",    // 36
    "verb.social",        // 37
    "verb.stative",       // 38
    "verb.weather",       // 39
};

// Index of a supersense name in the canonical order, or nullopt.
std::optional<int> supersense_index(std::string_view name);

}  // namespace fictsense
