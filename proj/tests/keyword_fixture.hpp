#pragma once

// Eight short documents whose class is fully determined by one keyword
// ("slug" vs "rose"), used to check that the network can actually learn.
#include <string>
#include <vector>

namespace fixtures {

inline const std::vector<std::string>& keyword_texts() {
    static const std::vector<std::string> texts = {
        "you are a slimy slug and everyone knows it",
        "what a lovely rose garden you have planted",
        "this slug of an argument convinces nobody here",
        "the rose smells wonderful in the morning air",
        "go away you pathetic slug nobody wants you",
        "she painted a rose on the old fence",
        "that slug brain comment helps absolutely nobody reading",
        "a single rose stood in the glass vase",
    };
    return texts;
}

inline const std::vector<int>& keyword_labels() {
    static const std::vector<int> labels = {1, 0, 1, 0, 1, 0, 1, 0};
    return labels;
}

} // namespace fixtures
