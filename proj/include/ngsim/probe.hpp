#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ngsim/chat.hpp"
#include "ngsim/parse.hpp"

namespace ngsim {

// The three meta-prompting questions about game recognition plus the
// opponent-cardinality question.
inline std::vector<std::string> recognition_questions() {
    return {
        "Does this setup remind you of any existing model or theory in social science?",
        "Tell me if you know what the optimal move is after a success.",
        "Finally, tell me how you think the game will converge globally.",
    };
}

inline std::string population_question() {
    return "Finally, do you think that you are playing against a single player "
           "or a whole population?";
}

struct ProbeResponse {
    std::string question;
    int repetition = 0;
    std::string raw_text;
    Stance stance = Stance::Unclear;
    bool complete = true;
};

struct ProbeTranscript {
    std::string model_id;
    std::vector<std::string> question_set;
    int repetitions = 5;
    std::vector<ProbeResponse> responses;  // repetitions x question_set
    bool incomplete = false;
};

// Sends the rendered game prompt followed by each probe question,
// repeated `repetitions` times, and classifies every reply. Transport
// failures mark the affected response and the transcript incomplete.
inline ProbeTranscript meta_probe(ChatEndpoint& endpoint, const std::string& game_prompt,
                                  const std::vector<std::string>& questions, int repetitions,
                                  const std::string& model_id, double temperature = 0.0) {
    if (repetitions < 1) throw ConfigError("repetitions: must be >= 1");
    ProbeTranscript transcript;
    transcript.model_id = model_id;
    transcript.question_set = questions;
    transcript.repetitions = repetitions;
    for (int rep = 0; rep < repetitions; ++rep) {
        for (const auto& question : questions) {
            ChatRequest request;
            request.model = model_id;
            request.temperature = temperature;
            request.session = "probe-" + std::to_string(rep);
            request.messages = {{"user", game_prompt}, {"user", question}};
            ProbeResponse response;
            response.question = question;
            response.repetition = rep;
            try {
                response.raw_text = endpoint.complete(request).text;
                response.stance = classify_stance(response.raw_text);
            } catch (const TransportError& e) {
                response.complete = false;
                response.raw_text = e.what();
                transcript.incomplete = true;
            } catch (const ProviderError& e) {
                response.complete = false;
                response.raw_text = e.what();
                transcript.incomplete = true;
            }
            transcript.responses.push_back(std::move(response));
        }
    }
    return transcript;
}

// One JSON object per response: (model_id, question, repetition,
// raw_text, stance).
inline std::string transcript_to_jsonl(const ProbeTranscript& transcript) {
    using json = nlohmann::ordered_json;
    std::string out;
    for (const auto& response : transcript.responses) {
        json line;
        line["model_id"] = transcript.model_id;
        line["question"] = response.question;
        line["repetition"] = response.repetition;
        line["raw_text"] = response.raw_text;
        line["stance"] = to_string(response.stance);
        if (!response.complete) line["incomplete"] = true;
        out += line.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------
// Canned replies of real chat models to the opponent-cardinality
// question, used as offline mock fixtures.
// ---------------------------------------------------------------------

struct CannedModelReply {
    std::string model_id;
    std::string reply;
};

inline std::vector<CannedModelReply> canned_population_replies() {
    return {
        {"llama-3.1-70b-instruct",
         "Regarding your final question, based on the setup, it appears that you are "
         "playing against a single player (Player 2). The game is a multi-round "
         "partnership game, and the payoffs are determined by the simultaneous actions "
         "of both players. There is no indication of a population or multiple opponents."},
        {"claude-3-opus-20240229",
         "Finally, based on the description, it sounds like you are playing against a "
         "single opponent repeatedly, not against a whole population. The setup "
         "describes a multi-round game with Player 2, suggesting a single partner that "
         "you interact with each round. If it was against a population, the description "
         "would likely refer to playing against a different or random opponent each "
         "round."},
        {"gpt-4.1",
         "The description is framed as a two-player game, so you are playing against a "
         "single other player* If you were playing against a population, the payoff "
         "might be based on the frequency of choices in the population (e.g., "
         "evolutionary game theory), but here, your outcome depends only on the "
         "simultaneous choice of one other agent."},
    };
}

} // namespace ngsim
