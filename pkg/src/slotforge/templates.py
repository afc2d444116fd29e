"""Built-in prompt template banks, ten per case family.

These are the stock instructions; replace them wholesale through the
``template_banks`` key of the forge config. Query-case templates carry a
``{queried_slots}`` placeholder, context-case templates a ``{context}``
placeholder, and every rendered prompt ends with its template's output-format
directive.
"""

PLAIN = [
    ("Listen to the current audio and extract all slot values mentioned in it.",
     "Format the output as JSON."),
    ("Identify every information-bearing mention in the current audio and assign it a slot label.",
     "Return the output as a JSON object."),
    ("Perform slot filling on the current utterance.",
     "Format your answer as JSON."),
    ("Extract the slots and their values from the audio clip.",
     "Answer with a JSON object mapping each slot label to its value."),
    ("What slot values does the speaker mention in this audio?",
     "Give the result as JSON."),
    ("Find all slot labels and values present in the current turn.",
     "Format the output as JSON."),
    ("Annotate the current audio turn with slot labels and their values.",
     "Respond with a single JSON object."),
    ("List the slots mentioned in the audio along with their values.",
     "Provide the output in JSON."),
    ("Detect the real-world entities, dates, times, and numerals in the audio and label them as slots.",
     "Format the response as JSON."),
    ("Fill the slots for the current audio turn.",
     "Reply with a JSON object."),
]

WITH_CONTEXT = [
    ("Previous turns:\n{context}\nUsing this context, extract all slot values from the current audio.",
     "Format the output as JSON."),
    ("Context:\n{context}\nPerform slot filling on the current utterance.",
     "Return the output as a JSON object."),
    ("Given the conversation so far:\n{context}\nIdentify the slot values mentioned in the current audio.",
     "Format your answer as JSON."),
    ("Here is the recent dialogue:\n{context}\nExtract the slots and values from the current turn.",
     "Answer with a JSON object mapping each slot label to its value."),
    ("Transcripts of the prior turns:\n{context}\nFind every slot value in the current audio clip.",
     "Give the result as JSON."),
    ("{context}\nWith the turns above as context, annotate the current audio with slot labels and values.",
     "Format the output as JSON."),
    ("Conversation history:\n{context}\nWhat slot values does the speaker mention in the current turn?",
     "Respond with a single JSON object."),
    ("Use the context below to interpret the audio.\n{context}\nList all slots and their values for the current turn.",
     "Provide the output in JSON."),
    ("Recent turns:\n{context}\nDetect the slots mentioned in the current audio.",
     "Format the response as JSON."),
    ("Context turns:\n{context}\nFill the slots for the current utterance.",
     "Reply with a JSON object."),
]

WITH_QUERY = [
    ("Find slot values for {queried_slots} in the current audio.",
     "Format the output as JSON."),
    ("Extract values for the following slots from the audio: {queried_slots}.",
     "Return the output as a JSON object."),
    ("For the current utterance, report the values of {queried_slots}.",
     "Format your answer as JSON."),
    ("Listen to the audio and fill these slots: {queried_slots}.",
     "Answer with a JSON object mapping each slot label to its value."),
    ("What are the values of {queried_slots} in the current turn?",
     "Give the result as JSON."),
    ("Determine the value of each of these slots from the audio: {queried_slots}.",
     "Format the output as JSON."),
    ("From the current audio clip, extract {queried_slots}.",
     "Respond with a single JSON object."),
    ("Report the values for the slots {queried_slots} mentioned in this audio.",
     "Provide the output in JSON."),
    ("Fill in the queried slots {queried_slots} using the current utterance.",
     "Format the response as JSON."),
    ("Search the current audio for the slots {queried_slots} and give their values.",
     "Reply with a JSON object."),
]

WITH_CONTEXT_AND_QUERY = [
    ("Previous turns:\n{context}\nFind slot values for {queried_slots} in the current audio.",
     "Format the output as JSON."),
    ("Context:\n{context}\nExtract values for these slots from the current utterance: {queried_slots}.",
     "Return the output as a JSON object."),
    ("Given the conversation so far:\n{context}\nReport the values of {queried_slots} for the current turn.",
     "Format your answer as JSON."),
    ("Recent dialogue:\n{context}\nFill these slots from the audio: {queried_slots}.",
     "Answer with a JSON object mapping each slot label to its value."),
    ("{context}\nUsing the turns above, what are the values of {queried_slots} in the current audio?",
     "Give the result as JSON."),
    ("Conversation history:\n{context}\nDetermine the value of each of {queried_slots} from the current clip.",
     "Format the output as JSON."),
    ("Here are the prior turns:\n{context}\nFrom the current audio, extract {queried_slots}.",
     "Respond with a single JSON object."),
    ("Context turns:\n{context}\nReport values for {queried_slots} mentioned in the current utterance.",
     "Provide the output in JSON."),
    ("Use this context:\n{context}\nThen fill the queried slots {queried_slots} for the current audio.",
     "Format the response as JSON."),
    ("Prior turns:\n{context}\nSearch the current audio for {queried_slots} and give their values.",
     "Reply with a JSON object."),
]
