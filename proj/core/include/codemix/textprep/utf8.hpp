#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codemix::textprep {

// Decodes UTF-8; ill-formed sequences are dropped.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

// White_Space property, as used for every whitespace split in the pipeline.
bool is_space(char32_t cp) noexcept;

// Whitespace-delimited words as views into `text`.
std::vector<std::string_view> split_words(std::string_view text);

// Byte offset of every codepoint start, plus text.size() as the final entry.
std::vector<std::size_t> codepoint_offsets(std::string_view text);

}  // namespace codemix::textprep
