//! Embedded word-frequency list backing the vocabulary-complexity axis.
//!
//! `STEMS` holds common English stems in approximate descending frequency.
//! At first use the list is expanded with regular inflections (plural,
//! past, progressive), each inheriting its stem's rank, yielding roughly
//! five thousand entries. Token rarity is log-scaled rank; tokens outside
//! the expanded list score 1.0.

use std::collections::HashMap;
use std::sync::OnceLock;

#[rustfmt::skip]
const STEMS: &[&str] = &[
    // rank band 0: function words
    "the", "of", "and", "a", "to", "in", "is", "you", "that", "it",
    "he", "was", "for", "on", "are", "as", "with", "his", "they", "i",
    "at", "be", "this", "have", "from", "or", "one", "had", "by", "word",
    "but", "not", "what", "all", "were", "we", "when", "your", "can", "said",
    "there", "use", "an", "each", "which", "she", "do", "how", "their", "if",
    "will", "up", "other", "about", "out", "many", "then", "them", "these", "so",
    "some", "her", "would", "make", "like", "him", "into", "time", "has", "look",
    "two", "more", "write", "go", "see", "number", "no", "way", "could", "people",
    "my", "than", "first", "water", "been", "call", "who", "oil", "its", "now",
    "find", "long", "down", "day", "did", "get", "come", "made", "may", "part",
    // rank band 1: very common content words
    "over", "new", "sound", "take", "only", "little", "work", "know", "place", "year",
    "live", "me", "back", "give", "most", "very", "after", "thing", "our", "just",
    "name", "good", "sentence", "man", "think", "say", "great", "where", "help", "through",
    "much", "before", "line", "right", "too", "mean", "old", "any", "same", "tell",
    "boy", "follow", "came", "want", "show", "also", "around", "form", "three", "small",
    "set", "put", "end", "does", "another", "well", "large", "must", "big", "even",
    "such", "because", "turn", "here", "why", "ask", "went", "men", "read", "need",
    "land", "different", "home", "us", "move", "try", "kind", "hand", "picture", "again",
    "change", "off", "play", "spell", "air", "away", "animal", "house", "point", "page",
    "letter", "mother", "answer", "found", "study", "still", "learn", "should", "america", "world",
    // rank band 2
    "high", "every", "near", "add", "food", "between", "own", "below", "country", "plant",
    "last", "school", "father", "keep", "tree", "never", "start", "city", "earth", "eye",
    "light", "thought", "head", "under", "story", "saw", "left", "few", "while", "along",
    "might", "close", "something", "seem", "next", "hard", "open", "example", "begin", "life",
    "always", "those", "both", "paper", "together", "got", "group", "often", "run", "important",
    "until", "children", "side", "feet", "car", "mile", "night", "walk", "white", "sea",
    "began", "grow", "took", "river", "four", "carry", "state", "once", "book", "hear",
    "stop", "without", "second", "later", "miss", "idea", "enough", "eat", "face", "watch",
    "far", "real", "almost", "let", "above", "girl", "sometimes", "mountain", "cut", "young",
    "talk", "soon", "list", "song", "being", "leave", "family", "body", "music", "color",
    // rank band 3
    "stand", "sun", "question", "fish", "area", "mark", "dog", "horse", "bird", "problem",
    "complete", "room", "knew", "since", "ever", "piece", "told", "usually", "friend", "easy",
    "heard", "order", "red", "door", "sure", "become", "top", "ship", "across", "today",
    "during", "short", "better", "best", "however", "low", "hour", "black", "product", "happen",
    "measure", "remember", "early", "wave", "reach", "listen", "wind", "rock", "space", "cover",
    "fast", "several", "hold", "himself", "toward", "five", "step", "morning", "passed", "vowel",
    "true", "hundred", "against", "pattern", "numeral", "table", "north", "slow", "money", "map",
    "farm", "pull", "draw", "voice", "seen", "cold", "cried", "plan", "notice", "south",
    "sing", "war", "ground", "fall", "king", "town", "unit", "figure", "certain", "field",
    "travel", "wood", "fire", "upon", "done", "english", "road", "half", "ten", "fly",
    // rank band 4
    "gave", "box", "finally", "wait", "correct", "oh", "quickly", "person", "became", "shown",
    "minute", "strong", "verb", "star", "front", "feel", "fact", "inch", "multiply", "nothing",
    "course", "stay", "wheel", "full", "force", "blue", "object", "decide", "surface", "deep",
    "moon", "island", "foot", "system", "busy", "test", "record", "boat", "common", "gold",
    "possible", "plane", "dry", "wonder", "laugh", "thousand", "ago", "ran", "check", "game",
    "shape", "equate", "hot", "brought", "heat", "snow", "tire", "bring", "yes", "distant",
    "fill", "east", "paint", "language", "among", "grand", "ball", "yet", "wait", "arm",
    "rule", "contain", "wide", "sail", "material", "size", "vary", "settle", "speak", "weight",
    "general", "ice", "matter", "circle", "pair", "include", "divide", "syllable", "felt", "perhaps",
    "pick", "sudden", "count", "square", "reason", "length", "represent", "art", "subject", "region",
    // rank band 5
    "energy", "hunt", "probable", "bed", "brother", "egg", "ride", "cell", "believe", "fraction",
    "forest", "sit", "race", "window", "store", "summer", "train", "sleep", "prove", "lone",
    "leg", "exercise", "wall", "catch", "mount", "wish", "sky", "board", "joy", "winter",
    "sat", "written", "wild", "instrument", "kept", "glass", "grass", "cow", "job", "edge",
    "sign", "visit", "past", "soft", "fun", "bright", "gas", "weather", "month", "million",
    "bear", "finish", "happy", "hope", "flower", "clothe", "strange", "gone", "jump", "baby",
    "eight", "village", "meet", "root", "buy", "raise", "solve", "metal", "whether", "push",
    "seven", "paragraph", "third", "shall", "held", "hair", "describe", "cook", "floor", "either",
    "result", "burn", "hill", "safe", "cat", "century", "consider", "type", "law", "bit",
    "coast", "copy", "phrase", "silent", "tall", "sand", "soil", "roll", "temperature", "finger",
    // rank band 6
    "industry", "value", "fight", "lie", "beat", "excite", "natural", "view", "sense", "ear",
    "else", "quite", "broke", "case", "middle", "kill", "son", "lake", "moment", "scale",
    "loud", "spring", "observe", "child", "straight", "consonant", "nation", "dictionary", "milk", "speed",
    "method", "organ", "pay", "age", "section", "dress", "cloud", "surprise", "quiet", "stone",
    "tiny", "climb", "cool", "design", "poor", "lot", "experiment", "bottom", "key", "iron",
    "single", "stick", "flat", "twenty", "skin", "smile", "crease", "hole", "trade", "melody",
    "trip", "office", "receive", "row", "mouth", "exact", "symbol", "die", "least", "trouble",
    "shout", "except", "wrote", "seed", "tone", "join", "suggest", "clean", "break", "lady",
    "yard", "rise", "bad", "blow", "blood", "touch", "grew", "cent", "mix", "team",
    "wire", "cost", "lost", "brown", "wear", "garden", "equal", "sent", "choose", "fell",
    // rank band 7
    "fit", "flow", "fair", "bank", "collect", "save", "control", "decimal", "gentle", "woman",
    "captain", "practice", "separate", "difficult", "doctor", "please", "protect", "noon", "whose", "locate",
    "ring", "character", "insect", "caught", "period", "indicate", "radio", "spoke", "atom", "human",
    "history", "effect", "electric", "expect", "crop", "modern", "element", "hit", "student", "corner",
    "party", "supply", "bone", "rail", "imagine", "provide", "agree", "thus", "capital", "chair",
    "danger", "fruit", "rich", "thick", "soldier", "process", "operate", "guess", "necessary", "sharp",
    "wing", "create", "neighbor", "wash", "bat", "rather", "crowd", "corn", "compare", "poem",
    "string", "bell", "depend", "meat", "rub", "tube", "famous", "dollar", "stream", "fear",
    "sight", "thin", "triangle", "planet", "hurry", "chief", "colony", "clock", "mine", "tie",
    "enter", "major", "fresh", "search", "send", "yellow", "gun", "allow", "print", "dead",
    // rank band 8
    "spot", "desert", "suit", "current", "lift", "rose", "arrive", "master", "track", "parent",
    "shore", "division", "sheet", "substance", "favor", "connect", "post", "spend", "chord", "fat",
    "glad", "original", "share", "station", "dad", "bread", "charge", "proper", "bar", "offer",
    "segment", "slave", "duck", "instant", "market", "degree", "populate", "chick", "dear", "enemy",
    "reply", "drink", "occur", "support", "speech", "nature", "range", "steam", "motion", "path",
    "liquid", "log", "meant", "quotient", "teeth", "shell", "neck", "oxygen", "sugar", "death",
    "pretty", "skill", "women", "season", "solution", "magnet", "silver", "thank", "branch", "match",
    "suffix", "especially", "fig", "afraid", "huge", "sister", "steel", "discuss", "forward", "similar",
    "guide", "experience", "score", "apple", "bought", "led", "pitch", "coat", "mass", "card",
    "band", "rope", "slip", "win", "dream", "evening", "condition", "feed", "tool", "total",
    // rank band 9
    "basic", "smell", "valley", "nor", "double", "seat", "continue", "block", "chart", "hat",
    "sell", "success", "company", "subtract", "event", "particular", "deal", "swim", "term", "opposite",
    "wife", "shoe", "shoulder", "spread", "arrange", "camp", "invent", "cotton", "born", "determine",
    "quart", "nine", "truck", "noise", "level", "chance", "gather", "shop", "stretch", "throw",
    "shine", "property", "column", "molecule", "select", "wrong", "gray", "repeat", "require", "broad",
    "prepare", "salt", "nose", "plural", "anger", "claim", "continent", "total", "weigh", "left",
    "image", "object", "label", "photo", "scene", "display", "screen", "text", "item", "count",
    "visible", "contains", "appear", "behind", "inside", "outside", "beside", "closest", "farthest", "largest",
    "smallest", "nearest", "holding", "standing", "sitting", "wearing", "facing", "pointing", "writing", "reading",
    "colored", "shaped", "located", "printed", "shown", "depicted", "pictured", "labeled", "marked", "drawn",
];

/// Regular inflected forms of a stem, conservative rules only.
fn inflections(stem: &str) -> Vec<String> {
    let mut out = Vec::new();
    if stem.len() < 3 || !stem.chars().all(|c| c.is_ascii_lowercase()) {
        return out;
    }
    let last = stem.as_bytes()[stem.len() - 1];
    if stem.ends_with('y') && stem.len() > 3 {
        let base = &stem[..stem.len() - 1];
        out.push(format!("{base}ies"));
        out.push(format!("{base}ied"));
        out.push(format!("{stem}ing"));
    } else if stem.ends_with('e') {
        let base = &stem[..stem.len() - 1];
        out.push(format!("{stem}s"));
        out.push(format!("{stem}d"));
        out.push(format!("{base}ing"));
    } else if stem.ends_with('s')
        || stem.ends_with('x')
        || stem.ends_with('z')
        || stem.ends_with("ch")
        || stem.ends_with("sh")
    {
        out.push(format!("{stem}es"));
        out.push(format!("{stem}ed"));
        out.push(format!("{stem}ing"));
    } else if last != b's' {
        out.push(format!("{stem}s"));
        out.push(format!("{stem}ed"));
        out.push(format!("{stem}ing"));
    }
    out
}

fn table() -> &'static HashMap<String, f64> {
    static TABLE: OnceLock<HashMap<String, f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = STEMS.len() as f64;
        let rarity = |rank: usize| ((1.0 + rank as f64).ln() / (1.0 + n).ln()).clamp(0.0, 1.0);
        let mut map = HashMap::new();
        for (rank, stem) in STEMS.iter().enumerate() {
            let r = rarity(rank);
            map.entry(stem.to_string()).or_insert(r);
            for form in inflections(stem) {
                map.entry(form).or_insert(r);
            }
        }
        map
    })
}

/// Rarity of a lowercase token in [0, 1]; 1.0 for out-of-list tokens.
pub fn rarity(token: &str) -> f64 {
    table().get(token).copied().unwrap_or(1.0)
}

/// Number of entries after inflection expansion.
#[cfg(test)]
pub fn entry_count() -> usize {
    table().len()
}
