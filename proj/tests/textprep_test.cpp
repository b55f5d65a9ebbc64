#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "toxcls/error.hpp"
#include "toxcls/stopwords.hpp"
#include "toxcls/textprep.hpp"

using toxcls::Vocabulary;

TEST_CASE("tokenizer lowercases and splits on non-letters") {
    REQUIRE(toxcls::tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
    REQUIRE(toxcls::tokenize("abc123def") == std::vector<std::string>{"abc", "def"});
    REQUIRE(toxcls::tokenize("don't") == std::vector<std::string>{"don", "t"});
    REQUIRE(toxcls::tokenize("  spaced   out  ") == std::vector<std::string>{"spaced", "out"});
    REQUIRE(toxcls::tokenize("12345 67890").empty());
    REQUIRE(toxcls::tokenize("").empty());
}

TEST_CASE("tokenizer keeps accented letters and lowercases them") {
    REQUIRE(toxcls::tokenize("Café") == std::vector<std::string>{"café"});
    REQUIRE(toxcls::tokenize("ÜBER") == std::vector<std::string>{"über"});
    // an invalid byte separates tokens instead of crashing
    const std::string bad = std::string("ab") + char(0xFF) + "cd";
    REQUIRE(toxcls::tokenize(bad) == std::vector<std::string>{"ab", "cd"});
}

TEST_CASE("vocabulary assigns indices in first-occurrence order") {
    const Vocabulary v = Vocabulary::build({{"red", "blue", "red"}, {"green", "blue"}});
    REQUIRE(v.size() == 3);
    REQUIRE(v.index_of("red") == 1);
    REQUIRE(v.index_of("blue") == 2);
    REQUIRE(v.index_of("green") == 3);
    REQUIRE(v.index_of("unseen") == 0);
    REQUIRE(v.word(1) == "red");
    REQUIRE(v.word(3) == "green");
    REQUIRE_THROWS_AS(v.word(0), toxcls::ArgumentError);
    REQUIRE_THROWS_AS(v.word(4), toxcls::ArgumentError);
    REQUIRE_THROWS_AS(Vocabulary::build({{}, {}}), toxcls::ArgumentError);
}

TEST_CASE("vocabulary save/load round trip preserves hash and indices") {
    const Vocabulary v = Vocabulary::build({{"alpha", "beta", "gamma"}});
    std::ostringstream os;
    v.save(os);
    std::istringstream is(os.str());
    const Vocabulary loaded = Vocabulary::load(is);
    REQUIRE(loaded.size() == v.size());
    REQUIRE(loaded.hash() == v.hash());
    for (int i = 1; i <= v.size(); ++i) REQUIRE(loaded.word(i) == v.word(i));

    std::istringstream bad("1\talpha\n3\tgamma\n");
    REQUIRE_THROWS_AS(Vocabulary::load(bad), toxcls::FormatError);
    std::istringstream no_tab("1 alpha\n");
    REQUIRE_THROWS_AS(Vocabulary::load(no_tab), toxcls::FormatError);
}

TEST_CASE("vocabulary from_words rebuilds exactly and rejects duplicates") {
    const Vocabulary v = Vocabulary::build({{"one", "two", "three"}});
    std::vector<std::string> words;
    for (int i = 1; i <= v.size(); ++i) words.push_back(v.word(i));
    const Vocabulary rebuilt = Vocabulary::from_words(words);
    REQUIRE(rebuilt.hash() == v.hash());
    REQUIRE_THROWS_AS(Vocabulary::from_words({"dup", "dup"}), toxcls::ArgumentError);
}

TEST_CASE("vocabulary hash is sensitive to content and order") {
    const Vocabulary a = Vocabulary::from_words({"x", "y"});
    const Vocabulary b = Vocabulary::from_words({"y", "x"});
    const Vocabulary c = Vocabulary::from_words({"x", "z"});
    REQUIRE(a.hash() != b.hash());
    REQUIRE(a.hash() != c.hash());
}

TEST_CASE("encode_and_pad pads short and truncates long documents") {
    const Vocabulary v = Vocabulary::build({{"a", "b", "c"}});
    const auto padded = toxcls::encode_and_pad({"a", "c"}, v, 5);
    REQUIRE(padded.indices == std::vector<int>{1, 3, 0, 0, 0});
    REQUIRE(padded.true_length == 2);

    const auto cut = toxcls::encode_and_pad({"a", "b", "c", "a", "b"}, v, 3);
    REQUIRE(cut.indices == std::vector<int>{1, 2, 3});
    REQUIRE(cut.true_length == 3);

    const auto oov = toxcls::encode_and_pad({"zzz", "b"}, v, 3);
    REQUIRE(oov.indices == std::vector<int>{0, 2, 0});
    REQUIRE(oov.true_length == 2);

    REQUIRE_THROWS_AS(toxcls::encode_and_pad({"a"}, v, 0), toxcls::ArgumentError);
}

TEST_CASE("stopword list is closed under tokenization") {
    const auto sw = toxcls::StopwordList::english();
    REQUIRE(sw.contains("the"));
    REQUIRE(sw.contains("and"));
    REQUIRE(sw.contains("is"));
    // entries are tokenized on insertion, so "don't" contributes "don" and "t"
    REQUIRE(sw.contains("don"));
    REQUIRE(sw.contains("t"));
    REQUIRE_FALSE(sw.contains("toxic"));
    REQUIRE_FALSE(sw.contains("hello"));

    REQUIRE(toxcls::StopwordList::none().size() == 0);
    const auto custom = toxcls::StopwordList::from_words({"Foo", "BAR baz"});
    REQUIRE(custom.contains("foo"));
    REQUIRE(custom.contains("bar"));
    REQUIRE(custom.contains("baz"));
    REQUIRE_FALSE(custom.contains("Foo"));
}

TEST_CASE("stopword file loader matches the built-in english list") {
    const auto from_file =
        toxcls::StopwordList::load(std::string(TOXCLS_DATA_DIR) + "/stopwords_english.txt");
    const auto builtin = toxcls::StopwordList::english();
    REQUIRE(from_file.size() == builtin.size());
    for (const auto& w : builtin.words()) REQUIRE(from_file.contains(w));
    REQUIRE_THROWS_AS(toxcls::StopwordList::load("/nonexistent/path.txt"), toxcls::IoError);
}
