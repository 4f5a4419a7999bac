#!/usr/bin/env python3
"""Regenerate the data files bundled with the package.

Writes language-identification training texts and held-out snippets,
the literal-vs-paraphrastic fixture corpus with its alignment manifest,
the copy-error fixture corpus, and small stopword lists. Deterministic;
run from the repository root:

    python scripts/gen_fixtures.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "litmetrics" / "data"

TRAINING = {
    "en": (
        "The regional parliament approved a new budget on Thursday after weeks "
        "of negotiation between the governing coalition and opposition parties. "
        "Lawmakers said the spending plan would expand funding for schools, "
        "hospitals, and public transport across the country. Economists expect "
        "growth to slow in the coming year as higher interest rates weigh on "
        "consumer spending and business investment. The central bank left its "
        "key rate unchanged last month, citing uncertainty about inflation and "
        "the labor market. Meanwhile, engineers completed the first section of "
        "the new rail line connecting the port with the industrial district, a "
        "project that had been delayed for years by funding disputes. City "
        "officials announced that the library would extend its opening hours "
        "during the summer, responding to requests from students and families. "
        "Researchers at the university published a study showing that urban "
        "gardens improve air quality and provide habitat for pollinators. The "
        "weather service warned of heavy rain along the coast over the weekend, "
        "urging residents to avoid low-lying roads. A local museum opened an "
        "exhibition of photographs documenting daily life in the harbor a "
        "century ago. Farmers in the valley reported a good harvest despite the "
        "dry spring, crediting new irrigation methods and hardier seed varieties."
    ),
    "de": (
        "Der Landtag verabschiedete am Donnerstag nach wochenlangen "
        "Verhandlungen zwischen der Regierungskoalition und der Opposition "
        "einen neuen Haushalt. Die Abgeordneten erklärten, der Finanzplan werde "
        "die Mittel für Schulen, Krankenhäuser und den öffentlichen Nahverkehr "
        "im ganzen Land erhöhen. Ökonomen erwarten, dass sich das Wachstum im "
        "kommenden Jahr verlangsamt, weil höhere Zinsen den Konsum und die "
        "Investitionen der Unternehmen belasten. Die Zentralbank ließ ihren "
        "Leitzins im vergangenen Monat unverändert und verwies auf die "
        "Unsicherheit über die Inflation und den Arbeitsmarkt. Unterdessen "
        "stellten Ingenieure den ersten Abschnitt der neuen Bahnstrecke fertig, "
        "die den Hafen mit dem Industriegebiet verbindet; das Projekt hatte "
        "sich wegen Streitigkeiten über die Finanzierung jahrelang verzögert. "
        "Die Stadtverwaltung kündigte an, dass die Bibliothek ihre "
        "Öffnungszeiten im Sommer verlängern werde, um den Wünschen von "
        "Studenten und Familien entgegenzukommen. Forscher der Universität "
        "veröffentlichten eine Studie, die zeigt, dass städtische Gärten die "
        "Luftqualität verbessern und Lebensraum für Bestäuber bieten. Der "
        "Wetterdienst warnte vor starkem Regen an der Küste am Wochenende und "
        "riet den Anwohnern, tief liegende Straßen zu meiden. Ein örtliches "
        "Museum eröffnete eine Ausstellung mit Fotografien, die den Alltag im "
        "Hafen vor hundert Jahren dokumentieren. Die Bauern im Tal meldeten "
        "trotz des trockenen Frühjahrs eine gute Ernte und verwiesen auf neue "
        "Bewässerungsmethoden und widerstandsfähigere Sorten."
    ),
    "ru": (
        "В четверг областной парламент после нескольких недель переговоров "
        "между правящей коалицией и оппозицией утвердил новый бюджет. Депутаты "
        "заявили, что финансовый план увеличит расходы на школы, больницы и "
        "общественный транспорт по всей стране. Экономисты ожидают, что в "
        "следующем году рост замедлится, поскольку высокие процентные ставки "
        "давят на потребление и инвестиции предприятий. В прошлом месяце "
        "центральный банк оставил ключевую ставку без изменений, сославшись на "
        "неопределенность с инфляцией и рынком труда. Тем временем инженеры "
        "завершили первый участок новой железнодорожной линии, соединяющей "
        "порт с промышленным районом; проект годами откладывался из-за споров "
        "о финансировании. Городские власти объявили, что летом библиотека "
        "продлит часы работы, отвечая на просьбы студентов и семей. "
        "Исследователи университета опубликовали работу, показывающую, что "
        "городские сады улучшают качество воздуха и дают приют опылителям. "
        "Метеослужба предупредила о сильных дождях на побережье в выходные и "
        "призвала жителей избегать низко расположенных дорог. Местный музей "
        "открыл выставку фотографий, запечатлевших повседневную жизнь гавани "
        "сто лет назад. Фермеры в долине сообщили о хорошем урожае несмотря на "
        "сухую весну, отметив новые методы орошения и более стойкие сорта."
    ),
    "zh": (
        "州议会经过执政联盟与反对党数周的谈判，于周四通过了新的预算案。"
        "议员们表示，这项开支计划将增加全国学校、医院和公共交通的经费。"
        "经济学家预计，随着利率上升抑制消费和企业投资，明年的经济增长将放缓。"
        "中央银行上个月维持基准利率不变，并指出通货膨胀和劳动力市场仍存在不确定性。"
        "与此同时，工程师完成了连接港口与工业区的新铁路线第一段，该项目曾因资金争议拖延多年。"
        "市政府宣布，图书馆将在夏季延长开放时间，以回应学生和家庭的请求。"
        "大学的研究人员发表了一项研究，表明城市花园能够改善空气质量，并为传粉昆虫提供栖息地。"
        "气象部门警告周末沿海地区将有强降雨，并敦促居民避开地势低洼的道路。"
        "当地博物馆举办了一场摄影展，记录一百年前港口的日常生活。"
        "山谷里的农民报告说，尽管春季干旱，收成仍然不错，他们把功劳归于新的灌溉方法和更耐旱的品种。"
        "政府还计划在明年扩建两所小学，并为乡村诊所增加医生。"
        "许多居民在公开听证会上对新的垃圾处理收费表达了担忧，官员承诺将在年底前公布详细方案。"
        "铁路公司表示，新线路通车后，从市中心到机场的时间将缩短一半，票价保持不变。"
        "环保组织呼吁加强对河流上游工厂排放的监管，并建议定期公开水质检测数据。"
        "今年的图书节吸引了来自三十多个城市的出版商，周末两天的参观人数超过了十万。"
    ),
}

# Held-out sentence pools, disjoint from the training texts. The English,
# German, and Russian pools are sentence-parallel (same content), which the
# copy-error fixture reuses as source/translation pairs.
POOLS = {
    "en": [
        "The committee will publish its final report next week, and officials expect the findings to shape policy for years to come.",
        "Volunteers planted hundreds of trees along the riverbank to protect the soil from erosion during the autumn storms.",
        "The airline canceled dozens of flights after the storm, leaving travelers stranded at airports across the region.",
        "Scientists discovered a new species of frog in the mountain forest, the third such finding in the past decade.",
        "The mayor promised to repair the old bridge before winter, though the council has not yet approved the funds.",
        "Students from the technical college built a solar-powered boat and entered it in the national engineering competition.",
        "The orchestra performed to a full house on Saturday, closing the festival with a program of modern works.",
        "Prices for fresh vegetables fell this month as the harvest reached markets earlier than expected.",
        "The hospital opened a new wing for children, doubling the number of beds available in the pediatric ward.",
        "Negotiators reached a draft agreement late on Friday, but both sides cautioned that details remain unresolved.",
        "The fishing fleet stayed in port for a third day as high winds and heavy seas battered the coastline.",
        "A software error delayed trains during the morning rush hour, and the operator apologized to commuters.",
        "The theater company announced a season of classic plays, hoping to win back audiences after two difficult years.",
        "Archaeologists uncovered the foundations of a medieval mill beneath the parking lot near the old market square.",
        "The bakery on the corner celebrated fifty years in business with free bread and a long line of loyal customers.",
        "Wind turbines off the northern coast produced record amounts of electricity during the January gales.",
        "The school board voted to extend the lunch program through the holidays for families who rely on it.",
        "Cyclists asked the city for protected lanes on the main avenue after a series of accidents this spring.",
        "The publishing house released the author's collected letters, edited by her granddaughter over seven years.",
        "Firefighters contained the blaze in the warehouse district overnight, and no injuries were reported.",
    ],
    "de": [
        "Der Ausschuss will seinen Abschlussbericht kommende Woche vorlegen, und Beamte erwarten, dass die Ergebnisse die Politik auf Jahre prägen werden.",
        "Freiwillige pflanzten hunderte Bäume am Flussufer, um den Boden während der Herbststürme vor Erosion zu schützen.",
        "Die Fluggesellschaft strich nach dem Unwetter dutzende Flüge, und Reisende saßen auf Flughäfen in der ganzen Region fest.",
        "Wissenschaftler entdeckten im Bergwald eine neue Froschart, der dritte derartige Fund innerhalb des letzten Jahrzehnts.",
        "Der Bürgermeister versprach, die alte Brücke vor dem Winter zu sanieren, doch der Rat hat die Mittel noch nicht bewilligt.",
        "Studenten der technischen Hochschule bauten ein solarbetriebenes Boot und meldeten es zum nationalen Ingenieurwettbewerb an.",
        "Das Orchester spielte am Samstag vor ausverkauftem Haus und beschloss das Festival mit einem Programm moderner Werke.",
        "Die Preise für frisches Gemüse sanken in diesem Monat, weil die Ernte früher als erwartet auf die Märkte kam.",
        "Das Krankenhaus eröffnete einen neuen Flügel für Kinder und verdoppelte damit die Zahl der Betten in der Kinderstation.",
        "Die Unterhändler einigten sich am späten Freitag auf einen Entwurf, doch beide Seiten warnten, dass Einzelheiten offen bleiben.",
        "Die Fischereiflotte blieb den dritten Tag im Hafen, weil Sturm und schwere See die Küste heimsuchten.",
        "Ein Softwarefehler verzögerte am Morgen die Züge im Berufsverkehr, und der Betreiber entschuldigte sich bei den Pendlern.",
        "Das Theaterensemble kündigte eine Spielzeit mit klassischen Stücken an und hofft, das Publikum nach zwei schwierigen Jahren zurückzugewinnen.",
        "Archäologen legten unter dem Parkplatz nahe dem alten Marktplatz die Fundamente einer mittelalterlichen Mühle frei.",
        "Die Bäckerei an der Ecke feierte ihr fünfzigjähriges Bestehen mit freiem Brot und einer langen Schlange treuer Kunden.",
        "Die Windräder vor der Nordküste erzeugten während der Januarstürme so viel Strom wie nie zuvor.",
        "Der Schulausschuss beschloss, das Mittagessen über die Ferien hinaus für Familien anzubieten, die darauf angewiesen sind.",
        "Radfahrer forderten von der Stadt geschützte Spuren auf der Hauptallee, nachdem es im Frühjahr mehrere Unfälle gegeben hatte.",
        "Der Verlag veröffentlichte die gesammelten Briefe der Autorin, herausgegeben von ihrer Enkelin in sieben Jahren Arbeit.",
        "Die Feuerwehr brachte den Brand im Lagerviertel über Nacht unter Kontrolle, Verletzte gab es nicht.",
    ],
    "ru": [
        "Комитет представит итоговый доклад на следующей неделе, и чиновники ожидают, что выводы будут определять политику на годы вперед.",
        "Добровольцы высадили сотни деревьев вдоль берега реки, чтобы защитить почву от размывания во время осенних бурь.",
        "После шторма авиакомпания отменила десятки рейсов, и пассажиры застряли в аэропортах по всему региону.",
        "Ученые обнаружили в горном лесу новый вид лягушки, это третья подобная находка за последнее десятилетие.",
        "Мэр пообещал отремонтировать старый мост до зимы, однако совет еще не выделил средства.",
        "Студенты технического института построили лодку на солнечных батареях и заявили ее на национальный инженерный конкурс.",
        "В субботу оркестр выступил при полном зале и завершил фестиваль программой современных произведений.",
        "Цены на свежие овощи в этом месяце снизились, поскольку урожай поступил на рынки раньше обычного.",
        "Больница открыла новое крыло для детей, удвоив число мест в детском отделении.",
        "Поздно вечером в пятницу переговорщики согласовали проект соглашения, но обе стороны предупредили, что детали не решены.",
        "Рыболовецкий флот третий день оставался в порту, потому что сильный ветер и волны обрушивались на побережье.",
        "Из-за сбоя в программном обеспечении утром задерживались поезда, и перевозчик извинился перед пассажирами.",
        "Театральная труппа объявила сезон классических пьес, надеясь вернуть зрителей после двух трудных лет.",
        "Археологи обнаружили под парковкой возле старой рыночной площади фундамент средневековой мельницы.",
        "Пекарня на углу отметила пятидесятилетие бесплатным хлебом и длинной очередью верных покупателей.",
        "Ветряные турбины у северного побережья выработали рекордное количество электроэнергии во время январских штормов.",
        "Школьный совет решил продлить программу обедов на каникулы для семей, которым она необходима.",
        "Велосипедисты попросили город построить защищенные полосы на главном проспекте после серии аварий этой весной.",
        "Издательство выпустило собрание писем писательницы, подготовленное ее внучкой за семь лет.",
        "Пожарные за ночь локализовали огонь в складском районе, пострадавших нет.",
    ],
    "zh": [
        "委员会将于下周公布最终报告，官员们预计这些结论将在未来数年影响相关政策的制定与执行。",
        "志愿者沿河岸种植了数百棵树木，以防止秋季风暴期间水土流失，保护两岸的农田和村庄。",
        "风暴过后，航空公司取消了数十个航班，许多旅客滞留在该地区的各个机场等待改签。",
        "科学家在山区森林中发现了一种新的蛙类，这是近十年来第三次类似的重要发现。",
        "市长承诺在冬天来临之前修复那座老桥，但市议会尚未批准所需的专项资金。",
        "技术学院的学生制造了一艘太阳能动力船，并报名参加了全国工程设计竞赛。",
        "乐团星期六在座无虚席的音乐厅演出，以一套现代作品为本届艺术节落下帷幕。",
        "由于收成比预期更早进入市场，本月新鲜蔬菜的价格明显下降，市民纷纷趁低采购。",
        "医院开设了新的儿童病区，使儿科可用床位的数量在原有基础上增加了一倍。",
        "谈判代表在周五深夜达成了协议草案，但双方都提醒说许多细节仍有待解决。",
        "由于大风和巨浪持续袭击海岸，渔船队连续第三天停泊在港口内无法出海作业。",
        "早高峰期间一个软件故障导致列车大面积晚点，运营方随后向通勤乘客公开道歉。",
        "剧团宣布了以经典剧目为主的新演出季，希望在经历两个艰难年头后重新赢得观众。",
        "考古学家在老集市广场附近的停车场下面，发掘出一座中世纪磨坊的完整地基。",
        "街角的面包店以免费面包庆祝开业五十周年，门前排起了由老顾客组成的长队。",
        "北部海域的风力发电机在一月的大风中创造了发电量的历史纪录，并网电量稳步上升。",
        "教育委员会投票决定在假期继续提供午餐项目，帮助那些依赖这项服务的家庭。",
        "在今年春天发生多起事故之后，骑车人请求市政府在主干道上设置受保护的自行车道。",
        "出版社发行了这位作家的书信全集，由她的外孙女历时七年整理编辑而成。",
        "消防员经过一夜奋战控制了仓库区的火势，事故没有造成人员受伤。",
    ],
}

STOPWORDS = {
    "en": ["the", "a", "an", "of", "to", "in", "and", "or", "is", "are", "was",
           "were", "be", "on", "at", "by", "for", "with", "it", "this", "that",
           "as", "from", "but", "not"],
    "de": ["der", "die", "das", "ein", "eine", "und", "oder", "ist", "sind",
           "war", "waren", "zu", "in", "an", "auf", "bei", "für", "mit", "von",
           "aus", "dass", "als", "aber", "nicht", "es"],
}

SNIPPETS_PER_LANG = 50
MIN_SNIPPET_CHARS = 210


def build_snippets(pool: list[str]) -> list[str]:
    """50 distinct snippets, each >= MIN_SNIPPET_CHARS, cycling the pool."""
    strides = [1, 3, 7]  # coprime with the pool size, one per block of 20
    snippets = []
    for k in range(SNIPPETS_PER_LANG):
        start = k % len(pool)
        stride = strides[k // len(pool)]
        text = pool[start]
        step = 1
        while len(text) < MIN_SNIPPET_CHARS:
            text += " " + pool[(start + step * stride) % len(pool)]
            step += 1
        snippets.append(text)
    return snippets


def write_lid_data() -> None:
    lid = DATA / "lid"
    lid.mkdir(parents=True, exist_ok=True)
    for lang, text in TRAINING.items():
        (lid / f"train_{lang}.txt").write_text(text, encoding="utf-8")
    for lang, pool in POOLS.items():
        with open(lid / f"heldout_{lang}.jsonl", "w", encoding="utf-8") as fh:
            for text in build_snippets(pool):
                fh.write(json.dumps({"text": text, "language": lang},
                                    ensure_ascii=False) + "\n")


NOUNS = ["minister", "harbor", "council", "storm", "bridge", "market",
         "village", "river", "factory", "treaty", "garden", "railway"]
ADJS = ["old", "northern", "crowded", "quiet", "narrow", "famous",
        "modern", "distant"]
VERBS = ["visited", "closed", "crossed", "repaired", "watched", "opened",
         "praised", "described"]
ADVS = ["yesterday", "slowly", "again", "early", "together", "finally"]
CONJS = ["because", "while", "although", "before"]


def gloss(token: str) -> str:
    """Deterministic word-for-word mapping into a toy target language."""
    if token in {",", "."}:
        return token
    return token + "u"


def make_litpara_fixture() -> None:
    """50 segments, two pseudo-systems with explicit tokens and alignments.

    The "gloss" system translates word for word in source order and aligns
    every token on the diagonal. The "free" system drops two content words
    and swaps the two clauses, so its alignments leave two source tokens
    unaligned and cross heavily.
    """
    rng = random.Random(7)
    fixtures = DATA / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    corpus_path = fixtures / "litpara_corpus.jsonl"
    manifest_path = fixtures / "litpara_alignments.jsonl"

    with open(corpus_path, "w", encoding="utf-8") as corpus, \
         open(manifest_path, "w", encoding="utf-8") as manifest:
        for n in range(50):
            clause1 = ["the", rng.choice(ADJS), rng.choice(NOUNS),
                       rng.choice(VERBS), "the", rng.choice(NOUNS)]
            clause2 = [rng.choice(CONJS), "the", rng.choice(NOUNS),
                       rng.choice(VERBS), "the", rng.choice(ADJS),
                       rng.choice(NOUNS), rng.choice(ADVS)]
            src = clause1 + [","] + clause2 + ["."]

            # Word-for-word system: same order, identity alignment.
            lit_tokens = [gloss(w) for w in src]
            lit_links = [(i, i) for i in range(len(src))]

            # Freer system: drop one content word per clause, swap clauses.
            drop1 = rng.choice([1, 2, 3, 5])        # inside clause1
            drop2 = rng.choice([9, 10, 12, 13, 14])  # inside clause2
            c1_idx = [i for i in range(0, 6) if i != drop1]
            c2_idx = [i for i in range(7, 15) if i != drop2]
            order = c2_idx + [6] + c1_idx + [15]    # clause2 , clause1 .
            free_tokens = [gloss(src[i]) for i in order]
            free_links = [(i, j) for j, i in enumerate(order)]

            record = {
                "id": f"seg{n:03d}",
                "src_lang": "en",
                "tgt_lang": "xx",
                "source": " ".join(src),
                "source_tokens": src,
                "translations": {
                    "gloss": " ".join(lit_tokens),
                    "free": " ".join(free_tokens),
                },
                "translation_tokens": {
                    "gloss": lit_tokens,
                    "free": free_tokens,
                },
            }
            corpus.write(json.dumps(record, ensure_ascii=False) + "\n")
            for system, links in (("gloss", lit_links), ("free", free_links)):
                manifest.write(json.dumps({
                    "id": f"seg{n:03d}",
                    "system": system,
                    "alignment": " ".join(f"{i}-{j}" for i, j in sorted(links)),
                    "aligner": "fixture",
                }) + "\n")


COPY_INDICES = {2, 5, 9, 12, 16, 19}


def make_copyerr_fixture() -> None:
    """En-De corpus where six "translations" are verbatim source copies."""
    fixtures = DATA / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    rng = random.Random(11)
    with open(fixtures / "copyerr_corpus.jsonl", "w", encoding="utf-8") as fh:
        for n, (en, de) in enumerate(zip(POOLS["en"], POOLS["de"])):
            is_copy = n in COPY_INDICES
            record = {
                "id": f"copy{n:02d}" if is_copy else f"ok{n:02d}",
                "src_lang": "en",
                "tgt_lang": "de",
                "source": en,
                "translations": {"candidate": en if is_copy else de},
                "qe": {"candidate": round(rng.uniform(19.0, 26.0), 2)},
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_stopwords() -> None:
    sw = DATA / "stopwords"
    sw.mkdir(parents=True, exist_ok=True)
    for lang, words in STOPWORDS.items():
        (sw / f"{lang}.txt").write_text(
            "# common function words\n" + "\n".join(words) + "\n",
            encoding="utf-8",
        )


def main() -> None:
    write_lid_data()
    make_litpara_fixture()
    make_copyerr_fixture()
    write_stopwords()
    print(f"fixtures written under {DATA}")


if __name__ == "__main__":
    main()
