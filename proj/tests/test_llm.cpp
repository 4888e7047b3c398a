#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ngsim/adapter.hpp"
#include "ngsim/chat.hpp"
#include "ngsim/parse.hpp"
#include "ngsim/probe.hpp"
#include "ngsim/prompt.hpp"
#include "ngsim/serialize.hpp"

using namespace ngsim;

// ---------------------------------------------------------------------
// Prompt rendering
// ---------------------------------------------------------------------

TEST_CASE("render: empty memory matches the golden fixture") {
    NamePool pool({"F", "J"});
    AgentState agent;
    PromptTemplate tmpl;
    tmpl.shuffle_seed = 0;
    const std::string text = render_prompt(agent, pool, tmpl);
    const std::string expected =
        "You are a player in a multi-round name matching game. Answer with a "
        "single name and nothing else.\n\n"
        "Rules: each round, you and your partner simultaneously pick one name "
        "from the options below. If you both pick the same name, you each "
        "score +1 points; if you pick different names, you each score -1 "
        "points.\n\n"
        "Name options: " + rendered_pool_order(pool, tmpl)[0] + ", " +
        rendered_pool_order(pool, tmpl)[1] + "\n" +
        "\nWhich name do you pick this round? Reply with exactly one name "
        "from the options.\n";
    REQUIRE(text == expected);
    REQUIRE(text.find("Your recent rounds") == std::string::npos);
}

TEST_CASE("render: purity, identical inputs give identical bytes") {
    NamePool pool({"A", "B", "C"});
    AgentState agent;
    agent.memory.push_back({3, 0, 1, false, -1.0});
    agent.memory.push_back({4, 1, 1, true, 1.0});
    PromptTemplate tmpl;
    tmpl.shuffle_seed = 99;
    REQUIRE(render_prompt(agent, pool, tmpl) == render_prompt(agent, pool, tmpl));
}

TEST_CASE("render: history lines show records oldest first") {
    NamePool pool({"A", "B"});
    AgentState agent;
    agent.memory.push_back({1, 0, 1, false, -1.0});
    agent.memory.push_back({2, 1, 1, true, 1.0});
    PromptTemplate tmpl;
    const std::string text = render_prompt(agent, pool, tmpl);
    const auto first = text.find("Round 1: you picked A, your partner picked B. "
                                 "Outcome: mismatch (payoff -1).");
    const auto second = text.find("Round 2: you picked B, your partner picked B. "
                                  "Outcome: match (payoff +1).");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    REQUIRE(first < second);
}

TEST_CASE("render: denylisted system text fails closed") {
    NamePool pool({"A", "B"});
    AgentState agent;
    PromptTemplate tmpl;
    tmpl.system_text = "You are one member of a large population of players.";
    REQUIRE_THROWS_AS(render_prompt(agent, pool, tmpl), TemplateError);
}

TEST_CASE("denylist catches aggregates and player counts") {
    REQUIRE(denylist_violation("there are 12 players in the game") == "player count");
    REQUIRE(denylist_violation("the majority prefers A") == "majority");
    REQUIRE(denylist_violation("Everyone picks B") == "everyone");
    REQUIRE(denylist_violation("you and your partner pick names").empty());
}

TEST_CASE("render: pool order is a seeded shuffle of all labels") {
    NamePool pool({"A", "B", "C", "D"});
    PromptTemplate tmpl;
    tmpl.shuffle_seed = 4;
    const auto order1 = rendered_pool_order(pool, tmpl);
    const auto order2 = rendered_pool_order(pool, tmpl);
    REQUIRE(order1 == order2);
    std::vector<std::string> sorted = order1;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(sorted == std::vector<std::string>{"A", "B", "C", "D"});
}

// ---------------------------------------------------------------------
// Choice parsing
// ---------------------------------------------------------------------

TEST_CASE("parse_choice ladder") {
    const std::vector<std::string> pool = {"F", "J"};
    REQUIRE(parse_choice("F", pool) == 0);
    REQUIRE(parse_choice("  J.  ", pool) == 1);
    REQUIRE(parse_choice("I will choose 'J' again.", pool) == 1);
    REQUIRE(parse_choice("My answer: F", pool) == 0);
    REQUIRE_THROWS_AS(parse_choice("F or J, hard to say", pool), ParseError);
    REQUIRE_THROWS_AS(parse_choice("no names here", pool), ParseError);
}

TEST_CASE("parse_choice requires standalone words") {
    const std::vector<std::string> pool = {"F", "J"};
    REQUIRE(parse_choice("Fine, J it is", pool) == 1);  // 'F' inside 'Fine' ignored
}

TEST_CASE("parse_choice is label-permutation equivariant") {
    const std::vector<std::string> pool = {"F", "J"};
    const std::vector<std::string> swapped = {"J", "F"};
    const std::string text = "I pick F this time.";
    const std::string text_swapped = "I pick J this time.";
    REQUIRE(parse_choice(text, pool) == 0);
    REQUIRE(parse_choice(text_swapped, swapped) == 0);
}

TEST_CASE("parse errors carry the raw reply text") {
    try {
        parse_choice("gibberish", {"A", "B"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.raw_text == "gibberish");
    }
}

// ---------------------------------------------------------------------
// Stance classification
// ---------------------------------------------------------------------

TEST_CASE("classify_stance on the canned model replies") {
    for (const auto& canned : canned_population_replies()) {
        INFO(canned.model_id);
        REQUIRE(classify_stance(canned.reply) == Stance::Single);
    }
}

TEST_CASE("classify_stance on constructed fixtures") {
    REQUIRE(classify_stance("I face many different partners drawn from a community.") ==
            Stance::Population);
    REQUIRE(classify_stance(
                "each round you meet a randomly drawn member of a large population") ==
            Stance::Population);
    REQUIRE(classify_stance("It could be either a single player or a population.") ==
            Stance::Unclear);
    REQUIRE(classify_stance("no opinion") == Stance::Unclear);
    REQUIRE(classify_stance("You play with Player 2 every round.") == Stance::Single);
}

// ---------------------------------------------------------------------
// Chat endpoints
// ---------------------------------------------------------------------

namespace {

struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        thread.join();
    }
};

std::string chat_body(const std::string& content) {
    nlohmann::json j;
    j["choices"][0]["message"]["content"] = content;
    return j.dump();
}

ClientConfig local_client(int port) {
    ClientConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.backoff_ms = 1;
    return cfg;
}

} // namespace

TEST_CASE("http endpoint returns the completion text") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(chat_body("F"), "application/json");
    });
    HttpChatEndpoint endpoint(local_client(server.port));
    ChatRequest request;
    request.messages = {{"user", "pick"}};
    const auto result = endpoint.complete(request);
    REQUIRE(result.text == "F");
    REQUIRE(result.retries == 0);
}

TEST_CASE("http endpoint retries 429 twice then succeeds") {
    std::atomic<int> calls{0};
    TestServer server([&calls](const httplib::Request&, httplib::Response& res) {
        if (++calls <= 2) {
            res.status = 429;
            res.set_content("slow down", "text/plain");
        } else {
            res.set_content(chat_body("ok"), "application/json");
        }
    });
    HttpChatEndpoint endpoint(local_client(server.port));
    ChatRequest request;
    request.messages = {{"user", "x"}};
    const auto result = endpoint.complete(request);
    REQUIRE(result.text == "ok");
    REQUIRE(result.retries == 2);
    REQUIRE(calls == 3);
}

TEST_CASE("http endpoint raises provider error on a non-retryable status") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("bad key", "text/plain");
    });
    HttpChatEndpoint endpoint(local_client(server.port));
    ChatRequest request;
    request.messages = {{"user", "x"}};
    try {
        endpoint.complete(request);
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        REQUIRE(e.status == 401);
    }
}

TEST_CASE("http endpoint raises transport error for an unreachable host") {
    ClientConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // reserved port, nothing listens
    cfg.max_attempts = 3;
    cfg.backoff_ms = 1;
    cfg.timeout_s = 1;
    HttpChatEndpoint endpoint(cfg);
    ChatRequest request;
    request.messages = {{"user", "x"}};
    REQUIRE_THROWS_AS(endpoint.complete(request), TransportError);
}

TEST_CASE("mock endpoint echoes its scripted reply") {
    auto endpoint = MockEndpoint::fixed("F");
    ChatRequest request;
    REQUIRE(endpoint->complete(request).text == "F");
}

// ---------------------------------------------------------------------
// Meta probe
// ---------------------------------------------------------------------

TEST_CASE("meta_probe runs repetitions x questions and classifies each") {
    auto endpoint = MockEndpoint::fixed(
        "You are playing against a single opponent, not a population.");
    const auto transcript =
        meta_probe(*endpoint, "game prompt", {population_question()}, 5, "mock-model");
    REQUIRE(transcript.responses.size() == 5);
    for (const auto& r : transcript.responses) {
        REQUIRE(r.complete);
        REQUIRE(r.stance == Stance::Single);
    }
    REQUIRE_FALSE(transcript.incomplete);
    const std::string jsonl = transcript_to_jsonl(transcript);
    REQUIRE(jsonl.find("\"stance\":\"single\"") != std::string::npos);
    REQUIRE(jsonl.find("\"model_id\":\"mock-model\"") != std::string::npos);
}

TEST_CASE("meta_probe marks transport failures incomplete") {
    class FailingEndpoint : public ChatEndpoint {
    public:
        ChatResult complete(const ChatRequest&) override {
            throw TransportError("transport: down");
        }
    };
    FailingEndpoint endpoint;
    const auto transcript = meta_probe(endpoint, "p", {population_question()}, 2, "m");
    REQUIRE(transcript.incomplete);
    for (const auto& r : transcript.responses) REQUIRE_FALSE(r.complete);
}

// ---------------------------------------------------------------------
// Adapter equivalence (unit-scale; the acceptance suite runs 10 seeds)
// ---------------------------------------------------------------------

TEST_CASE("mock-backed external agents reproduce the pure simulation") {
    PopulationConfig cfg;
    cfg.n = 6;
    cfg.labels = PopulationConfig::default_labels(2);
    cfg.dynamics = Dynamics::MemoryCoordination;
    cfg.memory_capacity = 5;
    cfg.seed = 2024;

    const auto pure = run_simulation(cfg);

    PopulationConfig external_cfg = cfg;
    PolicyParams external;
    external.kind = PolicyKind::ExternalModel;
    external_cfg.policy_mix.push_back(PolicyRange{0, cfg.n, external});

    MemoryPolicyMock mock(cfg.labels, PolicyParams{}, cfg.s_success, cfg.s_failure, cfg.seed);
    PromptTemplate tmpl;
    tmpl.memory_render_limit = cfg.memory_capacity;
    tmpl.s_success = cfg.s_success;
    tmpl.s_failure = cfg.s_failure;
    ChatModelChooser chooser(mock, tmpl, "mock");

    SimulationState state(external_cfg);
    state.attach_external(&chooser);
    auto driven = state.run();

    // the two configs hash differently by construction; compare the runs
    auto pure_copy = pure;
    pure_copy.config_hash = 0;
    driven.config_hash = 0;
    REQUIRE(trajectory_to_jsonl(pure_copy) == trajectory_to_jsonl(driven));
}
