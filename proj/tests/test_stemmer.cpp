#include <doctest.h>

#include "forkent/metrics/stemmer.hpp"

using forkent::metrics::porter_stem;
using forkent::metrics::tokenize_lower;

TEST_CASE("porter stemmer vocabulary spot checks") {
    // step 1
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("ties") == "ti");
    CHECK(porter_stem("caress") == "caress");
    CHECK(porter_stem("cats") == "cat");
    CHECK(porter_stem("feed") == "feed");
    CHECK(porter_stem("agreed") == "agre");
    CHECK(porter_stem("plastered") == "plaster");
    CHECK(porter_stem("bled") == "bled");
    CHECK(porter_stem("motoring") == "motor");
    CHECK(porter_stem("sing") == "sing");
    CHECK(porter_stem("conflated") == "conflat");
    CHECK(porter_stem("troubled") == "troubl");
    CHECK(porter_stem("sized") == "size");
    CHECK(porter_stem("hopping") == "hop");
    CHECK(porter_stem("tanned") == "tan");
    CHECK(porter_stem("falling") == "fall");
    CHECK(porter_stem("hissing") == "hiss");
    CHECK(porter_stem("fizzed") == "fizz");
    CHECK(porter_stem("failing") == "fail");
    CHECK(porter_stem("filing") == "file");
    CHECK(porter_stem("happy") == "happi");
    CHECK(porter_stem("sky") == "sky");
    // step 2
    CHECK(porter_stem("relational") == "relat");
    CHECK(porter_stem("conditional") == "condit");
    CHECK(porter_stem("rational") == "ration");
    CHECK(porter_stem("valenci") == "valenc");
    CHECK(porter_stem("hesitanci") == "hesit");
    CHECK(porter_stem("digitizer") == "digit");
    CHECK(porter_stem("radicalli") == "radic");
    CHECK(porter_stem("differentli") == "differ");
    CHECK(porter_stem("vileli") == "vile");
    CHECK(porter_stem("analogousli") == "analog");
    CHECK(porter_stem("vietnamization") == "vietnam");
    CHECK(porter_stem("predication") == "predic");
    CHECK(porter_stem("operator") == "oper");
    CHECK(porter_stem("feudalism") == "feudal");
    CHECK(porter_stem("decisiveness") == "decis");
    CHECK(porter_stem("hopefulness") == "hope");
    CHECK(porter_stem("callousness") == "callous");
    CHECK(porter_stem("formaliti") == "formal");
    CHECK(porter_stem("sensitiviti") == "sensit");
    CHECK(porter_stem("sensibiliti") == "sensibl");
    // step 3
    CHECK(porter_stem("triplicate") == "triplic");
    CHECK(porter_stem("formative") == "form");
    CHECK(porter_stem("formalize") == "formal");
    CHECK(porter_stem("electriciti") == "electr");
    CHECK(porter_stem("electrical") == "electr");
    CHECK(porter_stem("hopeful") == "hope");
    CHECK(porter_stem("goodness") == "good");
    // step 4
    CHECK(porter_stem("revival") == "reviv");
    CHECK(porter_stem("allowance") == "allow");
    CHECK(porter_stem("inference") == "infer");
    CHECK(porter_stem("airliner") == "airlin");
    CHECK(porter_stem("gyroscopic") == "gyroscop");
    CHECK(porter_stem("adjustable") == "adjust");
    CHECK(porter_stem("defensible") == "defens");
    CHECK(porter_stem("irritant") == "irrit");
    CHECK(porter_stem("replacement") == "replac");
    CHECK(porter_stem("adjustment") == "adjust");
    CHECK(porter_stem("dependent") == "depend");
    CHECK(porter_stem("adoption") == "adopt");
    CHECK(porter_stem("communism") == "commun");
    CHECK(porter_stem("activate") == "activ");
    CHECK(porter_stem("angulariti") == "angular");
    CHECK(porter_stem("homologous") == "homolog");
    CHECK(porter_stem("effective") == "effect");
    CHECK(porter_stem("bowdlerize") == "bowdler");
    // step 5
    CHECK(porter_stem("probate") == "probat");
    CHECK(porter_stem("rate") == "rate");
    CHECK(porter_stem("cease") == "ceas");
    CHECK(porter_stem("controll") == "control");
    CHECK(porter_stem("roll") == "roll");
}

TEST_CASE("porter stemmer on the bug keyword family") {
    CHECK(porter_stem("defect") == "defect");
    CHECK(porter_stem("defects") == "defect");
    CHECK(porter_stem("defective") == "defect");
    CHECK(porter_stem("error") == "error");
    CHECK(porter_stem("errors") == "error");
    CHECK(porter_stem("bug") == "bug");
    CHECK(porter_stem("bugs") == "bug");
    CHECK(porter_stem("issue") == "issu");
    CHECK(porter_stem("issues") == "issu");
    CHECK(porter_stem("mistake") == "mistak");
    CHECK(porter_stem("mistakes") == "mistak");
    CHECK(porter_stem("incorrect") == "incorrect");
    CHECK(porter_stem("fault") == "fault");
    CHECK(porter_stem("faults") == "fault");
    CHECK(porter_stem("flaw") == "flaw");
    CHECK(porter_stem("flaws") == "flaw");
    // near-misses that do not collapse onto keywords
    CHECK(porter_stem("faulty") == "faulti");
    CHECK(porter_stem("buggy") == "buggi");
}

TEST_CASE("short words pass through") {
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("is") == "is");
    CHECK(porter_stem("") == "");
}

TEST_CASE("tokenizer splits on non-alphanumerics and lowercases") {
    auto tokens = tokenize_lower("BUG: crash-on_startup (v2.1)");
    CHECK(tokens == std::vector<std::string>{"bug", "crash", "on", "startup", "v2", "1"});
    CHECK(tokenize_lower("").empty());
    CHECK(tokenize_lower("...").empty());
}
