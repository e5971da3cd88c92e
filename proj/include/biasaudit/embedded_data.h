/*
 * Copyright 2026 The biasaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BIASAUDIT_EMBEDDED_DATA_H_
#define BIASAUDIT_EMBEDDED_DATA_H_

#include <string_view>

namespace biasaudit {

// Contents of data/demo_corpus.jsonl: eight stereotype sentences, two per
// axis.
std::string_view DemoCorpusJsonl();

// Contents of data/default_lexicon.tsv.
std::string_view DefaultLexiconTsv();

}  // namespace biasaudit

#endif  // BIASAUDIT_EMBEDDED_DATA_H_
