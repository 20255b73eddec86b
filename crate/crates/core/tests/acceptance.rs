//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc as Shared;
use std::time::{Duration, Instant};

use bpy_morph::eval::{evaluate, f_score, parse_gold};
use bpy_morph::fst::{compose, concat, determinize_min, paths_ids, paths_with_cap, star, transduce, trim, union, Fst};
use bpy_morph::grammar::{self, MEITEI_LEXICON};
use bpy_morph::rules::{compile_rule, compile_ruleset, parse_rules, rewrite_symbols};
use bpy_morph::runtime::{Grammar, MANIFEST_FILE, NET_FILE, SYMS_FILE};
use bpy_morph::symbol::SymbolTable;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant, what: &str) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure(took < limit, || format!("{what} took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn up(g: &Grammar, word: &str) -> BTreeSet<String> {
    g.apply_up(word).unwrap().iter().map(ToString::to_string).collect()
}

fn down(g: &Grammar, lexical: &str) -> BTreeSet<String> {
    let ids = g.parse_lexical(lexical).unwrap().unwrap();
    g.apply_down_ids(&ids).unwrap().into_iter().collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn golden_words() -> Check {
    let expected = [
        ("দাদাগাছি", "দাদা+Noun+Pl"),
        ("মাছগি", "মাছ+Noun+PDM"),
        ("গুরুমাহেই", "গুরু+Noun+Pl"),
        ("মাছগুলি", "মাছ+Noun+Pl"),
        ("মানুহাবি", "মানু+Noun+Pl"),
        ("ঘরে", "ঘর+Noun+Sg+LCM"),
        ("পাছিলে", "পা+Verb+PsPSg"),
        ("পাছিলায়", "পা+Verb+PsPPl"),
        ("মামাগাছি", "মামা+Noun+Pl"),
        ("মানুয়ে", "মানু+Noun+Sg+CM"),
        ("মণি", "মণি+Noun+Sg"),
    ];
    let started = Instant::now();
    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    let compiled = started.elapsed();
    let mut exact = 0;
    for (word, analysis) in expected {
        let got = up(&g, word);
        ensure(got == set(&[analysis]), || {
            format!("{word}: got {got:?}, want {analysis}")
        })?;
        exact += 1;
    }
    let took = within(Duration::from_secs(1), started, "compile + analysis")?;
    Ok(format!(
        "{exact}/{} exact (compile {compiled:.2?}, total {took:.2?})",
        expected.len()
    ))
}

fn verb_paradigm() -> Check {
    let table = [
        ("+Pres+1P", "করুৱি"),
        ("+Pres+2P", "কর"),
        ("+Pres+3P", "করে"),
        ("+Past+1P", "করলু"),
        ("+Past+2P", "করলে"),
        ("+Past+3P", "করল"),
        ("+Fut+1P", "করতৌ"),
        ("+Fut+2P", "করতেই"),
        ("+Fut+3P", "করতই"),
    ];
    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    for (tags, surface) in table {
        let lexical = format!("কর+Verb{tags}");
        let got = down(&g, &lexical);
        ensure(got == set(&[surface]), || {
            format!("{lexical}: got {got:?}, want {surface}")
        })?;
        let back = up(&g, surface);
        ensure(back.contains(&lexical), || {
            format!("{surface} analyzes as {back:?}, missing {lexical}")
        })?;
    }
    Ok(format!("{} cells generated and analyzed back", table.len()))
}

fn phonological_rules() -> Check {
    let started = Instant::now();
    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    for (lexical, surface) in [("পা+Verb+Past+2P", "পেইলে"), ("কর+Verb+Past+1P", "করলু")] {
        let got = down(&g, lexical);
        ensure(got == set(&[surface]), || {
            format!("{lexical}: got {got:?}, want {surface}")
        })?;
    }
    // The rules alone turn the concatenated morphs into the surface forms.
    let rs = parse_rules(grammar::RULES).map_err(|e| e.to_string())?;
    for (morphs, surface) in [("পাইলে", "পেইলে"), ("করইলু", "করলু")] {
        let mut t = SymbolTable::new();
        let ids = t.tokenize_interning(morphs).map_err(|e| e.to_string())?;
        let net = compile_ruleset(&rs, &mut t).map_err(|e| e.to_string())?;
        let got: Vec<String> = transduce(&net, &ids, 32)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|o| net.symtab().render(o))
            .collect();
        ensure(got == [surface], || {
            format!("rules map {morphs} to {got:?}, want {surface}")
        })?;
    }

    const ALPHABET: [&str; 5] = ["a", "b", "c", "d", "e"];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    for case in 0..250 {
        let rule = random_rule(&mut rng, &ALPHABET);
        let mut t = table("abcde");
        let f = compile_rule(&rule, &mut t).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let s = random_string(&mut rng, &ALPHABET, 8);
            let ids: Vec<u32> = s.iter().map(|x| f.symtab().id(x).unwrap()).collect();
            let got: Vec<String> = transduce(&f, &ids, 32)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|o| f.symtab().render(o))
                .collect();
            let want = rewrite_symbols(&rule, &s).concat();
            ensure(got == [want.clone()], || {
                format!("case {case}: {rule:?} on {s:?} gave {got:?}, oracle {want}")
            })?;
            checked += 1;
        }
    }
    let took = within(Duration::from_secs(10), started, "rule checks")?;
    Ok(format!(
        "পেইলে and করলু derived; {checked} oracle cases, 0 mismatches ({took:.2?})"
    ))
}

fn algebra_oracles() -> Check {
    let started = Instant::now();
    let t = Shared::new(table("abc"));
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let machines = 500;
    let fail = |op: &str, case: usize| format!("{op} disagrees with path semantics on case {case}");
    for case in 0..machines {
        let (pa, pb) = if case % 2 == 0 {
            (EpsPolicy::NoEpsInput, EpsPolicy::Any)
        } else {
            (EpsPolicy::Any, EpsPolicy::NoEpsOutput)
        };
        let a = random_fst(&mut rng, &t, 6, pa);
        let b = random_fst(&mut rng, &t, 6, pb);
        let (ra, rb) = (rel(&a, 4), rel(&b, 4));

        let c = compose(&a, &b).map_err(|e| e.to_string())?;
        ensure(rel(&c, 4) == join(&ra, &rb, 4), || fail("compose", case))?;

        let u = union(&a, &b).map_err(|e| e.to_string())?;
        let mut want = ra.clone();
        want.extend(rb.iter().cloned());
        ensure(rel(&u, 4) == want, || fail("union", case))?;

        let cc = concat(&a, &b).map_err(|e| e.to_string())?;
        ensure(rel(&cc, 4) == rel_concat(&ra, &rb, 4), || fail("concat", case))?;

        ensure(rel(&star(&a), 4) == rel_star(&ra, 4), || fail("star", case))?;

        ensure(rel(&trim(&a), 5) == rel(&a, 5), || fail("trim", case))?;

        let d = determinize_min(&a);
        ensure(rel(&d, 6) == rel(&a, 6), || fail("determinize_min", case))?;
        ensure(pair_language(&d, 6) == pair_language(&a, 6), || {
            fail("determinize_min", case)
        })?;
    }
    let took = within(Duration::from_secs(30), started, "algebra checks")?;
    Ok(format!(
        "{machines} machine pairs × 6 operations, 0 mismatches ({took:.2?})"
    ))
}

/// P, R and F in basis points, rounded half-up, from counts alone.
fn exact_scores(total: u64, produced: u64, correct: u64) -> (u64, u64, u64) {
    let half_up = |num: u64, den: u64| if den == 0 { 0 } else { (2 * num + den) / (2 * den) };
    let p = half_up(correct * 10_000, produced);
    let r = half_up(produced * 10_000, total);
    // F = 2PR/(P+R) with P = c/p and R = p/t simplifies to 2cp / (p² + ct).
    let f = half_up(2 * correct * produced * 10_000, produced * produced + correct * total);
    (p, r, f)
}

fn bp(x: f64) -> u64 {
    (x * 100.0).round() as u64
}

fn scores() -> Check {
    let table = [
        ((91.13, 38.01), 53.64),
        ((91.03, 39.38), 54.98),
        ((93.24, 41.24), 57.19),
    ];
    for ((p, r), f) in table {
        ensure(f_score(p, r) == f, || {
            format!("f_score({p}, {r}) = {}, want {f}", f_score(p, r))
        })?;
    }

    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    let surfaces: Vec<String> = {
        let mut seen = BTreeSet::new();
        paths_with_cap(g.net(), 12, 12)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|(_, lower)| lower)
            .filter(|s| seen.insert(s.clone()))
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut trials = 0;
    for (n_correct, n_wrong) in [(600, 150), (0, 0), (1000, 0), (0, 1000), (333, 333)]
        .into_iter()
        .chain((0..5).map(|_| {
            let c = rng.gen_range(0..=1000);
            (c, rng.gen_range(0..=1000 - c))
        }))
    {
        let total = 1000;
        ensure(surfaces.len() >= n_correct + n_wrong, || {
            "not enough distinct surfaces".into()
        })?;
        let mut gold = String::new();
        for (i, s) in surfaces.iter().take(n_correct + n_wrong).enumerate() {
            let analysis = if i < n_correct {
                up(&g, s).into_iter().next().unwrap()
            } else {
                "মিছা+Noun".to_string()
            };
            gold.push_str(&format!("{s}\t{analysis}\n"));
        }
        for i in n_correct + n_wrong..total {
            gold.push_str(&format!("oov{i}\tx+Noun\n"));
        }
        let entries = parse_gold(&gold).map_err(|e| e.to_string())?;
        let report = evaluate(&g, &entries).map_err(|e| e.to_string())?;
        let produced = (n_correct + n_wrong) as u64;
        let want = exact_scores(total as u64, produced, n_correct as u64);
        let got = (bp(report.precision), bp(report.recall), bp(report.f_score));
        ensure(got == want, || {
            format!("{n_correct} correct, {n_wrong} wrong of {total}: got {got:?}, want {want:?} (basis points)")
        })?;
        trials += 1;
    }
    Ok(format!(
        "53.64, 54.98, 57.19 reproduced; {trials} synthetic 1000-word gold sets exact"
    ))
}

fn has_cycle(f: &Fst) -> bool {
    // 0 unvisited, 1 on the stack, 2 done
    let mut mark = vec![0u8; f.num_states()];
    fn visit(f: &Fst, s: u32, mark: &mut [u8]) -> bool {
        mark[s as usize] = 1;
        for a in f.arcs_from(s) {
            let m = mark[a.target as usize];
            if m == 1 || (m == 0 && visit(f, a.target, mark)) {
                return true;
            }
        }
        mark[s as usize] = 2;
        false
    }
    (0..f.num_states() as u32).any(|s| mark[s as usize] == 0 && visit(f, s, &mut mark))
}

fn linker_constraint() -> Check {
    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    ensure(!has_cycle(g.net()), || {
        "grammar net has a cycle; enumeration would not be exhaustive".into()
    })?;
    let meitei = grammar::roots_of(&grammar::bundled_lexicon(), MEITEI_LEXICON);
    ensure(!meitei.is_empty(), || "no Meitei roots in the lexicon".into())?;
    let all = paths_with_cap(g.net(), 32, 32).map_err(|e| e.to_string())?;
    let mut linked = 0;
    for (upper, _) in &all {
        for root in &meitei {
            if let Some(rest) = upper.strip_prefix(root.as_str()) {
                ensure(!rest.starts_with('+'), || {
                    format!("suffix attaches directly to Meitei root: {upper}")
                })?;
                if rest.starts_with("কর+Verb") {
                    linked += 1;
                }
            }
        }
    }
    ensure(linked > 0, || "no Meitei root reaches a verb ending".into())?;
    let got = up(&g, "হংকরানি");
    ensure(got == set(&["হংকর+Verb+Inf"]), || {
        format!("হংকরানি analyzes as {got:?}")
    })?;
    let direct = up(&g, "হংানি");
    ensure(direct.is_empty(), || format!("হংানি analyzes as {direct:?}"))?;
    Ok(format!(
        "{} paths enumerated; {linked} Meitei-root paths, all through the linker; হংকরানি → হংকর+Verb+Inf",
        all.len()
    ))
}

fn interchange_round_trip() -> Check {
    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (first, second) = (dir.path().join("first"), dir.path().join("second"));
    g.save(&first).map_err(|e| e.to_string())?;
    let loaded = Grammar::load(&first).map_err(|e| e.to_string())?;
    loaded.save(&second).map_err(|e| e.to_string())?;
    let mut bytes = 0;
    for file in [NET_FILE, SYMS_FILE, MANIFEST_FILE] {
        let a = std::fs::read(first.join(file)).map_err(|e| e.to_string())?;
        let b = std::fs::read(second.join(file)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{file} differs after write→read→write"))?;
        bytes += a.len();
    }
    for word in ["মানুহাবিয়েহে", "করতেই", "হংকরানি"] {
        ensure(up(&g, word) == up(&loaded, word), || {
            format!("{word} analyzes differently after loading")
        })?;
    }

    // A grammar built from a different lexicon and rule file as well.
    let other = bpy_morph::runtime::compile_grammar(
        "Multichar_Symbols +N +Pl\nLEXICON Root\nক N ;\nকা N ;\nLEXICON N\n%+N:0 P ;\nLEXICON P\n%+Pl:ই # ;\n# ;\n",
        "[আ -> এ || _ ই]",
    )
    .map_err(|e| e.to_string())?;
    let (third, fourth) = (dir.path().join("third"), dir.path().join("fourth"));
    other.save(&third).map_err(|e| e.to_string())?;
    Grammar::load(&third)
        .map_err(|e| e.to_string())?
        .save(&fourth)
        .map_err(|e| e.to_string())?;
    for file in [NET_FILE, SYMS_FILE, MANIFEST_FILE] {
        let a = std::fs::read(third.join(file)).map_err(|e| e.to_string())?;
        let b = std::fs::read(fourth.join(file)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{file} of the second grammar differs"))?;
    }
    Ok(format!(
        "bundled grammar ({bytes} bytes) and a second grammar byte-identical"
    ))
}

fn resident_kib() -> Option<u64> {
    let statm = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * 4)
}

fn scale() -> Check {
    let g = grammar::load_bundled().map_err(|e| e.to_string())?;
    let surfaces: Vec<String> = paths_ids(g.net(), 12)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(_, lower)| g.symtab().render(&lower))
        .collect();
    let letters: Vec<char> = ('\u{0995}'..='\u{09B9}').collect();
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let n = 100_000;
    let started = Instant::now();
    let mut analyzed = 0usize;
    let mut rss: HashMap<usize, u64> = HashMap::new();
    for i in 0..n {
        let (word, in_vocab) = if rng.gen_bool(0.3) {
            let len = rng.gen_range(3..=8);
            (
                (0..len)
                    .map(|_| letters[rng.gen_range(0..letters.len())])
                    .collect::<String>(),
                false,
            )
        } else {
            (surfaces[rng.gen_range(0..surfaces.len())].clone(), true)
        };
        let out = g.apply_up(&word).map_err(|e| e.to_string())?;
        ensure(!in_vocab || !out.is_empty(), || {
            format!("in-vocabulary word {word} got no analysis")
        })?;
        if !out.is_empty() {
            analyzed += 1;
        }
        if i == n / 10 || i == n - 1 {
            if let Some(kib) = resident_kib() {
                rss.insert(i, kib);
            }
        }
    }
    let took = within(Duration::from_secs(60), started, "100,000 analyses")?;
    let growth = match (rss.get(&(n / 10)), rss.get(&(n - 1))) {
        (Some(a), Some(b)) => {
            let growth = b.saturating_sub(*a);
            ensure(growth < 16 * 1024, || format!("resident memory grew by {growth} KiB"))?;
            format!("{growth} KiB")
        }
        _ => "unmeasured".to_string(),
    };
    Ok(format!(
        "{n} words ({analyzed} analyzed) in {took:.2?}; memory growth after warm-up {growth}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden words", golden_words),
        ("verb paradigm", verb_paradigm),
        ("phonological rules", phonological_rules),
        ("transducer algebra", algebra_oracles),
        ("scores", scores),
        ("Meitei linker", linker_constraint),
        ("interchange round trip", interchange_round_trip),
        ("scale", scale),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
