#include "coleforge/schema/intention_prompt.hpp"

#include "coleforge/core/text.hpp"

namespace coleforge::schema {

namespace {

// The spelling of the instruction text is kept as published; the model was
// prompted with it and "intension" is also the response key.
constexpr const char* kInstruction =
    "You are an excellent image analyst and caplable of guessing a image designer's intention. "
    "I will give you an image's necessary information, including image title, image format, "
    "image keywords, all text contained in the image. Your task is to output a JSON formatted "
    "string. This string contains a key value, intension, and the corresponding value is the "
    "user intention for designing this image. Please output the user intension from the "
    "perspective of the user using the image generation tool. Please note that the text "
    "information carried in the image may be helpful in the output results. Please include "
    "unique and necessary information in the entered text in the caption, such as website "
    "address, phone number, price, etc. Do not output any other irrelevent information. If "
    "needed, you can make reasonable guesses. Please refer to the example below for the "
    "desired format.";

constexpr const char* kExample =
    "{\"intension\": \"Design a Facebook post promoting a summer collection for women. "
    "Highlight the new arrival and offer a 60% discount for this week only. Encourage viewers "
    "to shop now.\"}";

}  // namespace

std::string render_intention_prompt(const RawImageInfo& raw) {
    std::string out;
    out += kInstruction;
    out += "\n\nExample output:\n";
    out += kExample;
    out += "\n\nImage title: ";
    out += raw.title;
    out += "\nImage format: ";
    out += raw.format;
    out += "\nImage keywords: ";
    out += text::join(raw.keywords, ", ");
    out += "\nAll text contained in the image:\n";
    for (const auto& t : raw.visible_texts) {
        out += "- ";
        out += t;
        out += "\n";
    }
    return out;
}

}  // namespace coleforge::schema
