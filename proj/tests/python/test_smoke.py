"""End-to-end smoke tests for the python bindings."""

import math
import random

import pytest

import newslabel as nl


def make_docs(classes, docs_per_class, tokens_per_doc, vocab_per_class, seed=0):
    """Synthetic corpus with disjoint per-class vocabularies (Bangla-script
    pseudo-words so they survive the cleaning pass)."""
    rng = random.Random(seed)
    consonants = "কখগঘচছজঝটঠডঢতথদধনপফবভমযরলশষসহ"
    vowels = "ািীুূেো"
    taken = set()

    def word():
        while True:
            w = "".join(rng.choice(consonants) + rng.choice(vowels) for _ in range(3))
            if w not in taken:
                taken.add(w)
                return w

    vocabs = [[word() for _ in range(vocab_per_class)] for _ in range(classes)]
    docs = []
    for c in range(classes):
        for d in range(docs_per_class):
            tokens = [rng.choice(vocabs[c]) for _ in range(tokens_per_doc)]
            docs.append(nl.ProcessedDoc(f"d{c}_{d}", tokens, f"class{c}"))
    return docs, vocabs


def test_clean_tokenize_stem_ngrams():
    config = nl.PreprocessConfig()
    assert nl.clean_text("abcXYZ0123456789", config) == ""
    assert nl.clean_text("!#$%&()*+", config) == ""
    cleaned = nl.clean_text("ভালো  খবর 77!\nআজ", config)
    assert cleaned == "ভালো খবর আজ"
    assert nl.tokenize(cleaned) == ["ভালো", "খবর", "আজ"]

    config.stemmer_suffixes = ["গুলো", "ের"]
    assert nl.stem("বইগুলো", config) == "বই"

    assert nl.ngrams(["a", "b", "c"], 3) == ["a", "b", "c", "a_b", "b_c", "a_b_c"]
    assert nl.remove_stopwords(["এক", "ও", "দুই"], ["ও"]) == ["এক", "দুই"]


def test_tfidf_formula():
    docs = [nl.ProcessedDoc("d1", ["a", "a", "b"]), nl.ProcessedDoc("d2", ["b", "c"])]
    vocab = nl.build_vocabulary(docs)
    assert vocab.size == 3

    sv = nl.tfidf_vector(docs[0], vocab)
    assert len(sv) == 1  # the all-document term 'b' carries zero weight
    assert sv.values[0] == pytest.approx((2 / 3) * math.log(2), abs=1e-12)

    bow = nl.bow_vector(docs[0], vocab)
    assert list(bow.indices) == [vocab.id_of("a"), vocab.id_of("b")]
    assert list(bow.values) == [2.0, 1.0]


def test_multilabel_metrics():
    Y = [[1, 0, 1]]
    Z = [[1, 1, 0]]
    assert nl.multilabel_precision(Y, Z) == pytest.approx(0.5)
    assert nl.multilabel_recall(Y, Z) == pytest.approx(0.5)
    assert nl.multilabel_f1(Y, Z) == pytest.approx(0.5)
    assert nl.hamming_loss(Y, Z) == pytest.approx(2 / 3)
    assert nl.multilabel_accuracy([[0, 0]], [[0, 0]]) == 1.0  # both-empty convention
    assert nl.onehot_from_single("b", ["a", "b", "c"]) == [0, 1, 0]
    assert nl.label_cardinality_histogram([[0, 0], [1, 0], [1, 1]]) == {0: 1, 1: 1, 2: 1}


def test_classifiers():
    X = [[1.0, 1.0], [0.9, 1.1], [-1.0, -1.0], [-1.1, -0.9]] * 5
    y = [0, 0, 1, 1] * 5
    params = nl.LinearFitParams()
    params.epochs = 50
    params.initial_lr = 0.5
    model = nl.fit_linear(X, y, params)
    assert [nl.predict(model, x) for x in X] == y
    probs = nl.predict_proba(model, X[0])
    assert sum(probs) == pytest.approx(1.0, abs=1e-9)

    knn = nl.fit_knn(X, y, k=3, metric="cosine")
    assert nl.knn_predict(knn, [0.8, 0.9]) == 0
    assert nl.knn_predict(knn, [-0.8, -0.9]) == 1


def test_lda_autolabel_pipeline(tmp_path):
    docs, vocabs = make_docs(classes=3, docs_per_class=40, tokens_per_doc=40,
                             vocab_per_class=15, seed=7)
    vocab = nl.build_vocabulary(docs)
    bows = [nl.doc2bow(d, vocab) for d in docs]

    params = nl.LdaParams()
    params.num_topics = 3
    params.alpha = 0.5
    params.passes = 8
    params.iterations = 10
    params.seed = 3
    model = nl.train_lda(bows, params, vocab)
    model.validate_counts()

    theta = nl.doc_topic_distribution(model, 0)
    assert sum(theta) == pytest.approx(1.0, abs=1e-6)
    assert nl.dominant_topic([0.75, 0.23, 0.02]) == 0

    labels = [d.label for d in docs]
    class_names = sorted(set(labels))
    mapping = nl.assign_topic_names(model, labels, class_names)
    assert sorted(mapping.topic_to_class) == class_names

    records = nl.build_auto_dataset(model, mapping, docs, class_names)
    report = nl.cluster_vs_original(records)
    assert report["accuracy"] > 0.8

    train, test = nl.threshold_split(records, 0.5)
    assert len(train) + len(test) == len(records)

    sets = nl.multilabel_binarize(records, 0.51)
    assert all(sum(bits) <= 1 for bits in sets)

    # lda artifacts round-trip through the store
    vpath, mpath = tmp_path / "vocab.txt", tmp_path / "lda.txt"
    nl.save_vocabulary(vocab, vpath)
    nl.save_lda(model, mpath)
    loaded = nl.load_lda(mpath, nl.load_vocabulary(vpath))
    assert loaded.num_topics == 3
    assert nl.top_keywords(loaded, 0, 5) == nl.top_keywords(model, 0, 5)


def test_embeddings():
    docs, _ = make_docs(classes=2, docs_per_class=15, tokens_per_doc=25,
                        vocab_per_class=10, seed=11)
    params = nl.SgnsParams()
    params.dim = 16
    params.epochs = 5
    params.negatives = 3
    params.window = 3
    model = nl.train_sgns(docs, params)
    assert model.dim == 16
    vec = model.average_features(docs[0].tokens)
    assert len(vec) == 16

    pv = nl.train_pvdm(docs, params)
    inferred = nl.infer_doc_vector(pv, docs[0].tokens, steps=10, seed=5)
    assert len(inferred) == 16
    assert nl.cosine_similarity(inferred, inferred) == pytest.approx(1.0)

    assert nl.char_ngrams("word", 6, 6) == ["<word>"]


def test_error_translation():
    with pytest.raises(ValueError):
        nl.build_vocabulary([])
    with pytest.raises(ValueError):
        nl.onehot_from_single("missing", ["a", "b"])
