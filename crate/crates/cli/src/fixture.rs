//! The bundled desk-scale fixture: 50 questions over 25 short science
//! topics, a matching corpus with filler passages, and three synthetic
//! raters. Generation is fully seeded, so the files under
//! `fixtures/desk50/` can always be reproduced bit for bit.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use oeq_core::model::{
    category, save_corpus, save_judgments, save_questions, CorpusPassage, GoldLabel,
    PassageSource, QuestionItem, RaterJudgment, ResponseOption,
};

const FIXTURE_SEED: u64 = 20240601;

struct Topic {
    slug: &'static str,
    name: &'static str,
    category: &'static str,
    facts: [&'static str; 3],
}

const TOPICS: [Topic; 25] = [
    Topic {
        slug: "roche-limit",
        name: "the Roche limit",
        category: category::CONCEPTS_DEFINITIONS,
        facts: [
            "The Roche limit is the minimum orbital distance at which a satellite held together only by its own gravity survives the tidal forces of its primary body.",
            "Inside the Roche limit, tidal stresses exceed the satellite's self-gravity and the body is pulled apart into a ring of debris.",
            "Planetary rings such as Saturn's lie largely inside the Roche limit of their planet.",
        ],
    },
    Topic {
        slug: "absolute-zero",
        name: "absolute zero",
        category: category::CONCEPTS_DEFINITIONS,
        facts: [
            "Absolute zero is the temperature at which a thermodynamic system reaches its minimum possible internal energy, defined as zero kelvin.",
            "No finite sequence of cooling operations can bring a system exactly to absolute zero, as stated by the third law of thermodynamics.",
            "Near absolute zero, dilute atomic gases condense into a single quantum state called a Bose-Einstein condensate.",
        ],
    },
    Topic {
        slug: "valence-electron",
        name: "a valence electron",
        category: category::CONCEPTS_DEFINITIONS,
        facts: [
            "A valence electron occupies the outermost shell of an atom and determines how the atom bonds with other atoms.",
            "Elements in the same group of the periodic table share the same number of valence electrons, which is why they react similarly.",
            "Metals conduct electricity because their valence electrons detach easily and move through the lattice.",
        ],
    },
    Topic {
        slug: "escape-velocity",
        name: "escape velocity",
        category: category::CONCEPTS_DEFINITIONS,
        facts: [
            "Escape velocity is the minimum launch speed at which an unpowered projectile leaves a body's gravitational field without falling back.",
            "Escape velocity depends only on the mass and radius of the attracting body, not on the mass of the projectile.",
            "At the surface of the Earth the escape velocity is about 11.2 kilometres per second.",
        ],
    },
    Topic {
        slug: "isotope",
        name: "an isotope",
        category: category::CONCEPTS_DEFINITIONS,
        facts: [
            "Isotopes are atoms of the same element whose nuclei hold the same number of protons but different numbers of neutrons.",
            "Chemical behaviour is nearly identical across isotopes because it is set by the proton count, while nuclear stability differs.",
            "Unstable isotopes decay at fixed rates, which makes them useful as clocks and tracers.",
        ],
    },
    Topic {
        slug: "entropy",
        name: "entropy",
        category: category::CONCEPTS_DEFINITIONS,
        facts: [
            "Entropy measures the number of microscopic arrangements compatible with a system's macroscopic state.",
            "In any spontaneous process the total entropy of an isolated system never decreases.",
            "Heat engines waste part of their input because extracting work requires exporting entropy to a cold reservoir.",
        ],
    },
    Topic {
        slug: "plate-tectonics",
        name: "plate tectonics",
        category: category::THEORIES_RELATIONSHIPS,
        facts: [
            "Plate tectonics explains the motion of rigid lithospheric plates riding on the slowly convecting mantle beneath them.",
            "Earthquakes and volcanoes concentrate along plate boundaries where plates collide, separate, or slide past each other.",
            "Seafloor spreading at mid-ocean ridges records plate motion in symmetric magnetic stripes on either side of the ridge.",
        ],
    },
    Topic {
        slug: "natural-selection",
        name: "natural selection",
        category: category::THEORIES_RELATIONSHIPS,
        facts: [
            "Natural selection is the differential survival and reproduction of individuals caused by heritable variation in their traits.",
            "Selection acts on phenotypes, but evolutionary change accumulates in the underlying allele frequencies of a population.",
            "Antibiotic resistance in bacteria is a directly observed example of natural selection under human-imposed pressure.",
        ],
    },
    Topic {
        slug: "general-relativity",
        name: "general relativity",
        category: category::THEORIES_RELATIONSHIPS,
        facts: [
            "General relativity describes gravity as the curvature of spacetime produced by mass and energy rather than as a force.",
            "Clocks deeper in a gravitational well run slower, an effect that satellite navigation systems must correct for.",
            "Light passing near a massive body is deflected, producing gravitational lenses that astronomers use to weigh galaxies.",
        ],
    },
    Topic {
        slug: "ideal-gas-law",
        name: "the ideal gas law",
        category: category::THEORIES_RELATIONSHIPS,
        facts: [
            "The ideal gas law relates the pressure, volume, amount, and temperature of a dilute gas through a single constant.",
            "The law follows from kinetic theory when molecules are treated as point particles with no mutual attraction.",
            "Real gases deviate from the ideal gas law near condensation, where intermolecular forces become significant.",
        ],
    },
    Topic {
        slug: "ohms-law",
        name: "Ohm's law",
        category: category::THEORIES_RELATIONSHIPS,
        facts: [
            "Ohm's law states that the current through many conductors is proportional to the voltage applied across them.",
            "The proportionality constant is the resistance, which grows with a conductor's length and shrinks with its cross-section.",
            "Devices such as diodes are called non-ohmic because their current is not proportional to the applied voltage.",
        ],
    },
    Topic {
        slug: "kepler-orbits",
        name: "Kepler's laws of planetary motion",
        category: category::THEORIES_RELATIONSHIPS,
        facts: [
            "Kepler's laws state that planets move on ellipses with the Sun at one focus, sweeping out equal areas in equal times.",
            "The square of a planet's orbital period grows with the cube of its mean distance from the Sun.",
            "Newton later derived all three of Kepler's laws from universal gravitation, unifying celestial and terrestrial mechanics.",
        ],
    },
    Topic {
        slug: "aurora",
        name: "the aurora",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "Auroras appear when charged particles from the solar wind are funnelled along Earth's magnetic field into the polar atmosphere.",
            "The glow's colours come from excited oxygen and nitrogen, with oxygen emitting the characteristic green light.",
            "Auroral activity intensifies after solar storms, when the stream of particles from the Sun strengthens.",
        ],
    },
    Topic {
        slug: "doppler-effect",
        name: "the Doppler effect",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "The Doppler effect is the shift in observed frequency when a wave source and an observer move relative to each other.",
            "An approaching siren sounds higher pitched and a receding one lower, because successive wavefronts arrive compressed or stretched.",
            "Astronomers read the redshift of galaxy spectra as a Doppler-like effect revealing that distant galaxies recede from us.",
        ],
    },
    Topic {
        slug: "leidenfrost",
        name: "the Leidenfrost effect",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "In the Leidenfrost effect a liquid droplet hovers on its own vapour cushion above a surface far hotter than its boiling point.",
            "The insulating vapour layer slows evaporation, letting droplets skitter across a hot pan for surprisingly long times.",
            "Above the Leidenfrost point, cooling a surface with water becomes ineffective because the vapour film blocks heat transfer.",
        ],
    },
    Topic {
        slug: "photoelectric",
        name: "the photoelectric effect",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "In the photoelectric effect, light ejects electrons from a metal only when its frequency exceeds a material-specific threshold.",
            "The kinetic energy of the ejected electrons depends on the light's frequency, not on its intensity.",
            "Einstein explained the effect by treating light as quanta of energy, a founding result of quantum theory.",
        ],
    },
    Topic {
        slug: "capillary-action",
        name: "capillary action",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "Capillary action is the rise or fall of a liquid in a narrow channel driven by surface tension and wall adhesion.",
            "The narrower the tube, the higher water climbs, because the curved meniscus supports a taller column.",
            "Plants rely on capillary action together with transpiration to lift water through their vascular tissue.",
        ],
    },
    Topic {
        slug: "greenhouse-effect",
        name: "the greenhouse effect",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "The greenhouse effect is the warming of a planet's surface caused by atmospheric gases absorbing and re-emitting infrared radiation.",
            "Without its natural greenhouse effect, Earth's mean surface temperature would sit far below freezing.",
            "Rising carbon dioxide concentrations strengthen the effect, shifting the planet's energy balance.",
        ],
    },
    Topic {
        slug: "superconductivity",
        name: "superconductivity",
        category: category::PHENOMENA_EFFECTS,
        facts: [
            "Superconductivity is the complete loss of electrical resistance in certain materials below a critical temperature.",
            "A superconductor expels magnetic fields from its interior, which lets magnets levitate above it.",
            "Superconducting coils carry persistent currents, the basis of the high-field magnets in MRI scanners.",
        ],
    },
    Topic {
        slug: "titration",
        name: "acid-base titration",
        category: category::APPLICATIONS_RULES,
        facts: [
            "In an acid-base titration, a solution of known concentration is added gradually until an indicator signals that the reaction is complete.",
            "The unknown concentration follows from the balanced equation and the volume delivered at the equivalence point.",
            "Choosing an indicator whose colour change matches the equivalence pH is essential for an accurate titration.",
        ],
    },
    Topic {
        slug: "vaccination",
        name: "vaccination",
        category: category::APPLICATIONS_RULES,
        facts: [
            "Vaccination trains the immune system by presenting a harmless form of a pathogen so that memory cells form before real exposure.",
            "When enough of a population is immunised, transmission chains break, protecting even the unvaccinated through herd immunity.",
            "Booster doses renew waning antibody levels and adapt protection to drifting pathogen variants.",
        ],
    },
    Topic {
        slug: "semiconductor-doping",
        name: "semiconductor doping",
        category: category::APPLICATIONS_RULES,
        facts: [
            "Doping inserts controlled impurities into a semiconductor crystal to set the type and density of its charge carriers.",
            "Donor atoms add mobile electrons making n-type material, while acceptor atoms create holes making p-type material.",
            "Joining p-type and n-type regions forms the junction on which diodes and transistors operate.",
        ],
    },
    Topic {
        slug: "crop-rotation",
        name: "crop rotation",
        category: category::APPLICATIONS_RULES,
        facts: [
            "Crop rotation alternates the plant families grown on a field across seasons to preserve soil fertility.",
            "Legumes in the rotation host bacteria that fix atmospheric nitrogen, replenishing the soil for the next crop.",
            "Rotation starves soil-borne pests of their host plants, reducing the need for chemical control.",
        ],
    },
    Topic {
        slug: "desalination",
        name: "reverse-osmosis desalination",
        category: category::APPLICATIONS_RULES,
        facts: [
            "Reverse-osmosis desalination forces seawater through a membrane that passes water molecules while rejecting dissolved salts.",
            "The applied pressure must exceed the seawater's osmotic pressure for fresh water to flow through the membrane.",
            "Energy-recovery devices reclaim pressure from the brine stream, which makes modern plants far more efficient.",
        ],
    },
    Topic {
        slug: "radiocarbon-dating",
        name: "radiocarbon dating",
        category: category::APPLICATIONS_RULES,
        facts: [
            "Radiocarbon dating estimates the age of organic remains from the fraction of carbon-14 left in them.",
            "Living tissue exchanges carbon with the atmosphere, so its carbon-14 level stays constant until death starts the decay clock.",
            "With a half-life of about 5,730 years, carbon-14 dating works well back to roughly fifty thousand years.",
        ],
    },
];

const FILLER_SENTENCES: [&str; 25] = [
    "The municipal archive catalogues ferry timetables dating back to the steam era.",
    "A juggler's clubs trace parabolas that stage lighting renders nearly solid.",
    "The bakery's sourdough schedule pivots on an overnight cold fermentation.",
    "Vintage synthesizer circuits drift in pitch as their capacitors age.",
    "The chess opening's popularity collapsed after a single televised defeat.",
    "Alpine trail markers fade to pastel after a decade of ultraviolet exposure.",
    "The orchestra tunes to an oboe because its pitch is stubbornly stable.",
    "Medieval ledgers record the price of saffron in troy ounces of silver.",
    "A well-thrown boomerang's return path depends on its asymmetric lift.",
    "The lighthouse keeper logged every lamp-oil delivery for forty years.",
    "Urban beekeepers harvest distinctly minty honey near linden avenues.",
    "The tram depot's turntable still runs on its original leather belts.",
    "Hand-pulled noodles owe their elasticity to patient gluten alignment.",
    "The observatory dome's shutters groan in the first frost of autumn.",
    "Antique typewriter ribbons survive longest in sealed cedar drawers.",
    "The ferry's wake braids into knots where two currents shear past.",
    "Falconry gloves are stitched from elk hide for its tooth resistance.",
    "The printing press's em quads went missing during the museum move.",
    "Competitive sandcastle builders sieve their sand to a single grain size.",
    "The funicular's counterweight carriage doubles as a freight car.",
    "Marathon pacing charts assume a headwind over the river crossing.",
    "The glassblower's annealing oven cools overnight on a strict curve.",
    "Community radio archives its jingles on reel-to-reel tape.",
    "The arboretum labels its oaks with both Latin and local names.",
    "Clockmakers burnish pivots to reduce friction without lubricant.",
];

/// The generated fixture, before serialization.
pub struct Fixture {
    pub questions: Vec<QuestionItem>,
    pub corpus: Vec<CorpusPassage>,
    pub judgments: Vec<RaterJudgment>,
}

/// Build the 50-question fixture deterministically.
pub fn desk50() -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);

    let mut corpus: Vec<CorpusPassage> = TOPICS
        .iter()
        .map(|t| CorpusPassage {
            id: format!("p-{}", t.slug),
            title: t.name.to_string(),
            body: t.facts.join(" "),
            source: PassageSource::Wikistem,
        })
        .collect();
    for (i, sentence) in FILLER_SENTENCES.iter().enumerate() {
        corpus.push(CorpusPassage {
            id: format!("p-filler-{i:02}"),
            title: format!("miscellany {i:02}"),
            body: sentence.to_string(),
            source: PassageSource::Other,
        });
    }

    let mut questions = Vec::with_capacity(50);
    let mut judgments = Vec::with_capacity(150);
    for (topic_idx, topic) in TOPICS.iter().enumerate() {
        for variant in 0..2usize {
            let prompt = match variant {
                0 => format!("What is {}?", topic.name),
                _ => format!("Which statement best describes {}?", topic.name),
            };
            let correct_text = topic.facts[variant];

            // Four distractors from four distinct other topics.
            let mut others: Vec<usize> = (0..TOPICS.len()).filter(|&i| i != topic_idx).collect();
            others.shuffle(&mut rng);
            let mut texts: Vec<String> = others[..4]
                .iter()
                .map(|&i| TOPICS[i].facts[rng.random_range(0..3)].to_string())
                .collect();
            texts.insert(rng.random_range(0..=texts.len()), correct_text.to_string());

            let options: Vec<ResponseOption> = texts
                .iter()
                .enumerate()
                .map(|(i, text)| ResponseOption {
                    id: char::from(b'A' + i as u8).to_string(),
                    text: text.clone(),
                })
                .collect();
            let correct_id = options
                .iter()
                .find(|o| o.text == correct_text)
                .expect("correct option present")
                .id
                .clone();

            let question = QuestionItem {
                id: format!("q-{}-{variant}", topic.slug),
                prompt,
                options,
                category: Some(topic.category.to_string()),
                gold: Some(GoldLabel::SingleCorrect(correct_id.clone())),
            };

            // A latent quality order: the correct answer first, then the
            // distractors in a question-specific order. Raters perturb it.
            let mut latent: Vec<String> = question
                .options
                .iter()
                .map(|o| o.id.clone())
                .filter(|id| *id != correct_id)
                .collect();
            latent.shuffle(&mut rng);
            latent.insert(0, correct_id.clone());

            for rater in ["t1", "t2", "t3"] {
                let mut perceived = latent.clone();
                // Occasional adjacent swap models disagreement.
                if rng.random_bool(0.35) {
                    let at = rng.random_range(0..perceived.len() - 1);
                    perceived.swap(at, at + 1);
                }
                let top3: Vec<String> = perceived.iter().take(3).cloned().collect();
                judgments.push(RaterJudgment {
                    rater_id: rater.to_string(),
                    question_id: question.id.clone(),
                    top1: top3[0].clone(),
                    top3,
                });
            }

            questions.push(question);
        }
    }

    Fixture {
        questions,
        corpus,
        judgments,
    }
}

/// Serialize the fixture into `dir` as the three standard files.
pub fn write_to(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    let fixture = desk50();
    save_questions(&fixture.questions, dir.join("questions.jsonl"))?;
    save_corpus(&fixture.corpus, dir.join("corpus.jsonl"))?;
    save_judgments(&fixture.judgments, dir.join("judgments.jsonl"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_valid_and_sized() {
        let fixture = desk50();
        assert_eq!(fixture.questions.len(), 50);
        assert_eq!(fixture.corpus.len(), 50);
        assert_eq!(fixture.judgments.len(), 150);
        for q in &fixture.questions {
            q.validate().unwrap();
            assert_eq!(q.options.len(), 5);
            assert!(q.category.is_some());
        }
        for j in &fixture.judgments {
            j.validate().unwrap();
        }
    }

    #[test]
    fn fixture_is_deterministic() {
        let a = desk50();
        let b = desk50();
        assert_eq!(a.questions, b.questions);
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.judgments, b.judgments);
    }

    #[test]
    fn judgments_mostly_agree_with_gold() {
        let fixture = desk50();
        let mut agree = 0usize;
        for j in &fixture.judgments {
            let q = fixture
                .questions
                .iter()
                .find(|q| q.id == j.question_id)
                .unwrap();
            let Some(GoldLabel::SingleCorrect(gold)) = &q.gold else {
                panic!("fixture gold is single-correct")
            };
            if &j.top1 == gold {
                agree += 1;
            }
        }
        // Raters start from the correct answer and only sometimes swap it
        // away, so the majority should agree with gold.
        assert!(agree * 2 > fixture.judgments.len(), "agreement {agree}/150");
    }
}
