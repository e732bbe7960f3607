#!/usr/bin/env python3
"""Emit the mini-WordNet noun fixture (index.noun, data.noun) in WNdb format.

Synset offsets are byte offsets into data.noun, as in the real database.
Run from this directory: python3 build_fixture.py
"""

# key: (lemmas, hypernym keys, gloss)
TAXONOMY = [
    ("entity", ["entity"], [], "that which is perceived to have its own distinct existence"),
    ("physical_entity", ["physical_entity"], ["entity"], "an entity that has physical existence"),
    ("abstraction", ["abstraction", "abstract_entity"], ["entity"], "a general concept"),
    ("thing", ["thing"], ["physical_entity"], "a separate and self-contained entity"),
    ("object", ["object", "physical_object"], ["physical_entity"], "a tangible and visible entity"),
    ("whole", ["whole", "unit"], ["object"], "an assemblage of parts regarded as a single entity"),
    ("causal_agent", ["causal_agent", "cause"], ["physical_entity"], "any entity that produces an effect"),
    ("living_thing", ["living_thing", "animate_thing"], ["whole"], "a living entity"),
    ("organism", ["organism", "being"], ["living_thing"], "a living thing that can act independently"),
    # people
    ("person", ["person", "individual", "someone", "somebody", "human"], ["organism", "causal_agent"], "a human being"),
    ("male", ["male", "male_person"], ["person"], "a person who belongs to the sex that cannot have babies"),
    ("female", ["female", "female_person"], ["person"], "a person who belongs to the sex that can have babies"),
    ("man", ["man", "adult_male"], ["male"], "an adult person who is male"),
    ("woman", ["woman", "adult_female"], ["female"], "an adult female person"),
    ("boy", ["boy", "male_child"], ["male"], "a youthful male person"),
    ("girl", ["girl", "female_child"], ["female"], "a youthful female person"),
    ("juvenile", ["juvenile", "juvenile_person"], ["person"], "a young person"),
    ("child", ["child", "kid", "youngster"], ["juvenile"], "a young person of either sex"),
    ("baby", ["baby", "babe", "infant"], ["child"], "a very young child"),
    ("adult", ["adult", "grownup"], ["person"], "a fully developed person"),
    ("worker", ["worker"], ["person"], "a person who works"),
    ("player", ["player", "participant"], ["person"], "a person who participates in a game"),
    ("rider", ["rider"], ["person"], "a traveler who actively rides"),
    ("cyclist", ["cyclist", "bicyclist", "cycler"], ["rider"], "a person who rides a bicycle"),
    ("passenger", ["passenger", "rider"], ["person"], "a traveler riding in a vehicle"),
    ("skier", ["skier"], ["player"], "someone who travels on skis"),
    ("surfer", ["surfer", "surfboarder"], ["player"], "someone who rides surfboards"),
    ("chef", ["chef"], ["worker"], "a professional cook"),
    ("farmer", ["farmer", "husbandman"], ["worker"], "a person who operates a farm"),
    ("pilot", ["pilot", "airplane_pilot"], ["worker"], "someone licensed to operate an aircraft"),
    # animals
    ("animal", ["animal", "beast", "creature", "fauna"], ["organism"], "a living organism with voluntary movement"),
    ("domestic_animal", ["domestic_animal", "pet"], ["animal"], "any of various animals domesticated to live with humans"),
    ("chordate", ["chordate"], ["animal"], "any animal with a notochord"),
    ("vertebrate", ["vertebrate", "craniate"], ["chordate"], "animals having a bony or cartilaginous skeleton"),
    ("mammal", ["mammal", "mammalian"], ["vertebrate"], "any warm-blooded vertebrate having the skin covered with hair"),
    ("placental", ["placental", "placental_mammal", "eutherian"], ["mammal"], "mammals having a placenta"),
    ("carnivore", ["carnivore"], ["placental"], "a terrestrial or aquatic flesh-eating mammal"),
    ("canine", ["canine", "canid"], ["carnivore"], "any of various fissiped mammals with nonretractile claws"),
    ("dog", ["dog", "domestic_dog"], ["canine", "domestic_animal"], "a member of the genus Canis"),
    ("puppy", ["puppy", "pup"], ["dog"], "a young dog"),
    ("poodle", ["poodle", "poodle_dog"], ["dog"], "an intelligent dog with a heavy curly solid-colored coat"),
    ("terrier", ["terrier"], ["dog"], "any of several usually small short-bodied breeds"),
    ("retriever", ["retriever"], ["dog"], "a dog with heavy water-resistant coat"),
    ("golden_retriever", ["golden_retriever"], ["retriever"], "an English breed having a long silky golden coat"),
    ("sheepdog", ["shepherd_dog", "sheepdog", "sheep_dog"], ["dog"], "any of various usually long-haired breeds of dog"),
    ("wolf", ["wolf"], ["canine"], "any of various predatory carnivorous canine mammals"),
    ("fox", ["fox"], ["canine"], "alert carnivorous mammal with pointed muzzle"),
    ("feline", ["feline", "felid"], ["carnivore"], "any of various lithe-bodied roundheaded fissiped mammals"),
    ("cat", ["cat", "true_cat"], ["feline"], "feline mammal usually having thick soft fur"),
    ("house_cat", ["house_cat", "housecat", "domestic_cat"], ["cat", "domestic_animal"], "any domesticated member of the genus Felis"),
    ("kitten", ["kitten", "kitty"], ["house_cat"], "young domestic cat"),
    ("tabby", ["tabby", "tabby_cat"], ["house_cat"], "a cat with a grey or tawny coat"),
    ("big_cat", ["big_cat"], ["feline"], "any of several large cats"),
    ("lion", ["lion", "king_of_beasts"], ["big_cat"], "large gregarious predatory feline"),
    ("tiger", ["tiger"], ["big_cat"], "large feline of forests in most of Asia"),
    ("bear", ["bear"], ["carnivore"], "massive plantigrade carnivorous or omnivorous mammals"),
    ("ungulate", ["ungulate", "hoofed_mammal"], ["placental"], "any of a number of mammals with hooves"),
    ("even_toed_ungulate", ["even-toed_ungulate", "artiodactyl"], ["ungulate"], "an ungulate with an even number of functional toes"),
    ("ruminant", ["ruminant"], ["even_toed_ungulate"], "any of various cud-chewing hoofed mammals"),
    ("bovid", ["bovid"], ["ruminant"], "hollow-horned ruminants"),
    ("bovine", ["bovine"], ["bovid"], "any of various members of the genus Bos"),
    ("cattle", ["cattle", "cows", "kine", "oxen"], ["bovine"], "domesticated bovine animals"),
    ("cow", ["cow"], ["cattle"], "mature female of mammals of which the male is called bull"),
    ("bull", ["bull"], ["cattle"], "uncastrated adult male of domestic cattle"),
    ("calf", ["calf"], ["cattle"], "young of domestic cattle"),
    ("ox", ["ox"], ["cattle"], "an adult castrated bull"),
    ("sheep", ["sheep"], ["bovid"], "woolly usually horned ruminant mammal"),
    ("lamb", ["lamb"], ["sheep"], "young sheep"),
    ("ram", ["ram", "tup"], ["sheep"], "uncastrated adult male sheep"),
    ("goat", ["goat", "caprine_animal"], ["bovid"], "any of numerous agile ruminants"),
    ("deer", ["deer", "cervid"], ["ruminant"], "distinguished from bovids by the male's having solid deciduous antlers"),
    ("odd_toed_ungulate", ["odd-toed_ungulate", "perissodactyl"], ["ungulate"], "placental mammals having hooves with an odd number of toes"),
    ("equine", ["equine", "equid"], ["odd_toed_ungulate"], "hoofed mammals having slender legs and a flat coat"),
    ("horse", ["horse", "equus_caballus"], ["equine"], "solid-hoofed herbivorous quadruped domesticated since prehistoric times"),
    ("pony", ["pony"], ["horse"], "a range horse of the western United States"),
    ("foal", ["foal"], ["horse"], "a young horse"),
    ("stallion", ["stallion", "entire"], ["horse"], "uncastrated adult male horse"),
    ("mare", ["mare", "female_horse"], ["horse"], "female equine animal"),
    ("zebra", ["zebra"], ["equine"], "any of several fleet black-and-white striped African equines"),
    ("elephant", ["elephant"], ["placental"], "five-toed pachyderm"),
    ("primate", ["primate"], ["placental"], "any placental mammal of the order Primates"),
    ("monkey", ["monkey"], ["primate"], "any of various long-tailed primates"),
    # birds
    ("bird", ["bird"], ["vertebrate"], "warm-blooded egg-laying vertebrates"),
    ("parrot", ["parrot"], ["bird"], "usually brightly colored zygodactyl tropical birds"),
    ("pigeon", ["pigeon"], ["bird"], "wild and domesticated birds having a heavy body"),
    ("dove", ["dove"], ["pigeon"], "any of numerous small pigeons"),
    ("bird_of_prey", ["bird_of_prey", "raptor", "raptorial_bird"], ["bird"], "any of numerous carnivorous birds"),
    ("eagle", ["eagle", "bird_of_jove"], ["bird_of_prey"], "any of various large keen-sighted diurnal birds of prey"),
    ("hawk", ["hawk"], ["bird_of_prey"], "diurnal bird of prey typically having short rounded wings"),
    ("owl", ["owl", "bird_of_minerva"], ["bird_of_prey"], "nocturnal bird of prey"),
    ("gallinaceous_bird", ["gallinaceous_bird", "gallinacean"], ["bird"], "heavy-bodied largely ground-feeding domestic or game birds"),
    ("domestic_fowl", ["domestic_fowl", "fowl", "poultry"], ["gallinaceous_bird"], "a domesticated gallinaceous bird"),
    ("chicken", ["chicken", "gallus_gallus"], ["domestic_fowl"], "a domestic fowl bred for flesh or eggs"),
    ("hen", ["hen", "biddy"], ["chicken"], "adult female chicken"),
    ("rooster", ["rooster", "cock"], ["chicken"], "adult male chicken"),
    ("aquatic_bird", ["aquatic_bird"], ["bird"], "wading and swimming and diving birds"),
    ("waterfowl", ["waterfowl", "water_bird", "waterbird"], ["aquatic_bird"], "freshwater aquatic bird"),
    ("anseriform_bird", ["anseriform_bird"], ["waterfowl"], "chiefly web-footed swimming birds"),
    ("duck", ["duck"], ["anseriform_bird"], "small wild or domesticated web-footed broad-billed swimming bird"),
    ("swan", ["swan"], ["anseriform_bird"], "stately heavy-bodied aquatic bird with very long neck"),
    ("goose", ["goose"], ["anseriform_bird"], "web-footed long-necked typically gregarious migratory aquatic birds"),
    ("seabird", ["seabird", "sea_bird", "seafowl"], ["aquatic_bird"], "a bird that frequents coastal waters and the open ocean"),
    ("gull", ["gull", "seagull", "sea_gull"], ["seabird"], "mostly white aquatic bird having long pointed wings"),
    ("penguin", ["penguin"], ["seabird"], "short-legged flightless birds of cold southern regions"),
    ("wading_bird", ["wading_bird", "wader"], ["aquatic_bird"], "any of many long-legged birds that wade in water"),
    ("flamingo", ["flamingo"], ["wading_bird"], "large pink to scarlet web-footed wading bird"),
    ("heron", ["heron"], ["wading_bird"], "grey or white wading bird with long neck and long legs"),
    ("fish", ["fish"], ["vertebrate"], "any of various mostly cold-blooded aquatic vertebrates"),
    # artifacts
    ("artifact", ["artifact", "artefact"], ["whole"], "a man-made object taken as a whole"),
    ("instrumentality", ["instrumentality", "instrumentation"], ["artifact"], "an artifact that is instrumental in accomplishing some end"),
    ("container", ["container"], ["instrumentality"], "any object that can be used to hold things"),
    ("vessel_container", ["vessel"], ["container"], "an object used as a container"),
    ("bottle", ["bottle"], ["vessel_container"], "a glass or plastic vessel used for storing drinks"),
    ("wine_bottle", ["wine_bottle"], ["bottle"], "a bottle for holding wine"),
    ("beer_bottle", ["beer_bottle"], ["bottle"], "a bottle for holding beer"),
    ("water_bottle", ["water_bottle"], ["bottle"], "a bottle for holding water"),
    ("jar", ["jar"], ["vessel_container"], "a vessel with a large mouth and no handles"),
    ("pot", ["pot", "flowerpot"], ["container"], "a container in which plants are cultivated"),
    ("cup", ["cup"], ["container"], "a small open container usually used for drinking"),
    ("glass", ["glass", "drinking_glass"], ["container"], "a container for holding liquids while drinking"),
    ("bag", ["bag"], ["container"], "a flexible container with a single opening"),
    ("box", ["box"], ["container"], "a container with a flat base and sides"),
    ("conveyance", ["conveyance", "transport"], ["instrumentality"], "something that serves as a means of transportation"),
    ("vehicle", ["vehicle"], ["conveyance"], "a conveyance that transports people or objects"),
    ("craft", ["craft"], ["vehicle"], "a vehicle designed for navigation in or on water or air"),
    ("aircraft", ["aircraft"], ["craft"], "a vehicle that can fly"),
    ("heavier_than_air_craft", ["heavier-than-air_craft"], ["aircraft"], "a non-buoyant aircraft"),
    ("airplane", ["airplane", "aeroplane", "plane"], ["heavier_than_air_craft"], "an aircraft that has a fixed wing"),
    ("jet", ["jet", "jet_plane"], ["airplane"], "an airplane powered by jet engines"),
    ("jetliner", ["jetliner"], ["jet"], "a jet-propelled airliner"),
    ("airliner", ["airliner"], ["airplane"], "a commercial airplane that carries passengers"),
    ("helicopter", ["helicopter", "chopper"], ["heavier_than_air_craft"], "an aircraft without wings"),
    ("vessel_craft", ["vessel", "watercraft"], ["craft"], "a craft designed for water transportation"),
    ("boat", ["boat"], ["vessel_craft"], "a small vessel for travel on water"),
    ("ship", ["ship"], ["vessel_craft"], "a vessel that carries passengers or freight"),
    ("sailboat", ["sailboat", "sailing_boat"], ["boat"], "a small sailing vessel"),
    ("canoe", ["canoe"], ["boat"], "small and light boat"),
    ("ferry", ["ferry", "ferryboat"], ["boat"], "a boat that transports people or vehicles"),
    ("yacht", ["yacht", "racing_yacht"], ["vessel_craft"], "an expensive vessel propelled by sail or power"),
    ("wheeled_vehicle", ["wheeled_vehicle"], ["vehicle"], "a vehicle that moves on wheels"),
    ("self_propelled_vehicle", ["self-propelled_vehicle"], ["wheeled_vehicle"], "a wheeled vehicle that carries its own motor"),
    ("motor_vehicle", ["motor_vehicle", "automotive_vehicle"], ["self_propelled_vehicle"], "a self-propelled wheeled vehicle"),
    ("car", ["car", "auto", "automobile", "machine", "motorcar"], ["motor_vehicle"], "a motor vehicle with four wheels"),
    ("taxi", ["cab", "taxi", "taxicab"], ["car"], "a car driven by a person whose job is to take passengers"),
    ("jeep", ["jeep", "landrover"], ["car"], "a car suitable for traveling over rough terrain"),
    ("convertible", ["convertible"], ["car"], "a car that has top that can be folded"),
    ("truck", ["truck", "motortruck"], ["motor_vehicle"], "an automotive vehicle suitable for hauling"),
    ("van", ["van"], ["truck"], "a truck with an enclosed cargo space"),
    ("motorcycle", ["motorcycle", "bike"], ["motor_vehicle"], "a motor vehicle with two wheels"),
    ("scooter", ["scooter", "motor_scooter"], ["motorcycle"], "a wheeled vehicle with small wheels"),
    ("bicycle", ["bicycle", "bike", "wheel", "cycle"], ["wheeled_vehicle"], "a wheeled vehicle that has two wheels and is moved by foot pedals"),
    ("tricycle", ["tricycle", "trike"], ["wheeled_vehicle"], "a vehicle with three wheels"),
    ("locomotive", ["locomotive", "engine"], ["self_propelled_vehicle"], "a wheeled vehicle consisting of a self-propelled engine"),
    ("railcar", ["car", "railcar", "railway_car", "railroad_car"], ["wheeled_vehicle"], "a wheeled vehicle adapted to the rails of railroad"),
    ("public_transport", ["public_transport"], ["conveyance"], "conveyance for passengers or mail or freight"),
    ("bus", ["bus", "autobus", "coach", "omnibus"], ["public_transport"], "a vehicle carrying many passengers"),
    ("train", ["train", "railroad_train"], ["public_transport"], "public transport provided by a line of railway cars"),
    ("tram", ["tram", "streetcar", "trolley"], ["public_transport"], "a wheeled vehicle that runs on rails"),
    ("furnishing", ["furnishing"], ["instrumentality"], "the furniture and appliances in a room"),
    ("furniture", ["furniture", "piece_of_furniture"], ["furnishing"], "furnishings that make a room ready for occupancy"),
    ("seat", ["seat"], ["furniture"], "furniture that is designed for sitting on"),
    ("chair", ["chair"], ["seat"], "a seat for one person with a support for the back"),
    ("armchair", ["armchair"], ["chair"], "chair with a support on each side for arms"),
    ("stool", ["stool"], ["seat"], "a simple seat without a back or arms"),
    ("bench", ["bench"], ["seat"], "a long seat for more than one person"),
    ("sofa", ["sofa", "couch", "lounge"], ["seat"], "an upholstered seat for more than one person"),
    ("table", ["table"], ["furniture"], "a piece of furniture having a smooth flat top"),
    ("dining_table", ["dining_table", "board"], ["table"], "a table at which meals are served"),
    ("desk", ["desk"], ["table"], "a piece of furniture with a writing surface"),
    ("coffee_table", ["coffee_table", "cocktail_table"], ["table"], "low table where magazines can be placed"),
    ("bed", ["bed"], ["furniture"], "a piece of furniture that provides a place to sleep"),
    ("shelf", ["shelf"], ["furniture"], "a support that consists of a horizontal surface"),
    ("device", ["device"], ["instrumentality"], "an instrumentality invented for a particular purpose"),
    ("equipment", ["equipment"], ["instrumentality"], "an instrumentality needed for an undertaking"),
    ("electronic_equipment", ["electronic_equipment"], ["equipment"], "equipment that involves the controlled conduction of electrons"),
    ("receiver", ["receiver", "receiving_system"], ["electronic_equipment"], "set that receives radio or tv signals"),
    ("television", ["television", "television_receiver", "television_set", "tv", "tv_set"], ["receiver"], "an electronic device that receives television signals"),
    ("monitor", ["monitor"], ["electronic_equipment"], "display produced by a device that takes signals"),
    ("screen", ["screen", "crt_screen"], ["electronic_equipment"], "the display that is electronically created on the surface"),
    ("telephone", ["telephone", "phone", "telephone_set"], ["electronic_equipment"], "electronic equipment that converts sound into electrical signals"),
    ("machine", ["machine"], ["device"], "any mechanical or electrical device that transmits energy"),
    ("computer", ["computer", "computing_machine"], ["machine"], "a machine for performing calculations automatically"),
    ("laptop", ["laptop", "laptop_computer"], ["computer"], "a portable computer small enough to use in your lap"),
    ("keyboard", ["keyboard"], ["device"], "device consisting of a set of keys"),
    ("lamp", ["lamp"], ["device"], "artificial source of visible illumination"),
    ("ball", ["ball"], ["equipment"], "round object that is hit or thrown or kicked in games"),
    ("kite", ["kite"], ["device"], "plaything consisting of a light frame covered with paper"),
    ("umbrella", ["umbrella"], ["device"], "a lightweight handheld collapsible canopy"),
    ("structure", ["structure", "construction"], ["artifact"], "a thing constructed"),
    ("building", ["building", "edifice"], ["structure"], "a structure that has a roof and walls"),
    ("house", ["house"], ["building"], "a dwelling that serves as living quarters"),
    ("area", ["area"], ["structure"], "a part of a structure having some specific characteristic"),
    ("room", ["room"], ["area"], "an area within a building enclosed by walls"),
    ("living_room", ["living_room", "living-room", "sitting_room", "lounge"], ["room"], "a room in a private house"),
    ("kitchen", ["kitchen"], ["room"], "a room equipped for preparing meals"),
    ("bedroom", ["bedroom", "sleeping_room"], ["room"], "a room used primarily for sleeping"),
    ("bridge", ["bridge", "span"], ["structure"], "a structure that allows people to cross an obstacle"),
    ("wall", ["wall"], ["structure"], "an architectural partition"),
    ("window", ["window"], ["structure"], "a framework of wood or metal that contains a glass windowpane"),
    ("fence", ["fence", "fencing"], ["structure"], "a barrier that serves to enclose an area"),
    ("way", ["way"], ["artifact"], "any artifact consisting of a road or path"),
    ("road", ["road", "route"], ["way"], "an open way for travel"),
    ("street", ["street"], ["road"], "a thoroughfare in a city"),
    ("track", ["track", "rail", "rails"], ["way"], "a bar or pair of parallel bars of rolled steel"),
    ("facility", ["facility", "installation"], ["artifact"], "a building or place that provides a particular service"),
    ("station", ["station"], ["facility"], "a facility equipped with special equipment"),
    ("airport", ["airport", "airdrome"], ["facility"], "an airfield equipped with control tower"),
    ("representation", ["representation"], ["artifact"], "a creation that is a visual or tangible rendering of someone"),
    ("picture", ["picture", "image", "icon"], ["representation"], "a visual representation of an object or scene"),
    ("photograph", ["photograph", "photo", "exposure", "pic"], ["picture"], "a representation of a person or scene in the form of a print"),
    ("painting", ["painting", "picture"], ["representation"], "graphic art consisting of an artistic composition"),
    # plants
    ("plant", ["plant", "flora", "plant_life"], ["organism"], "a living organism lacking the power of locomotion"),
    ("vascular_plant", ["vascular_plant", "tracheophyte"], ["plant"], "green plant having a vascular system"),
    ("houseplant", ["houseplant"], ["vascular_plant"], "any of a variety of plants grown indoors"),
    ("herb", ["herb", "herbaceous_plant"], ["vascular_plant"], "a plant lacking a permanent woody stem"),
    ("grass", ["grass"], ["herb"], "narrow-leaved green herbage"),
    ("spermatophyte", ["spermatophyte", "seed_plant"], ["vascular_plant"], "plant that reproduces by means of seeds"),
    ("angiosperm", ["angiosperm", "flowering_plant"], ["spermatophyte"], "plants having seeds in a closed ovary"),
    ("flower", ["flower"], ["angiosperm"], "a plant cultivated for its blooms"),
    ("rose", ["rose", "rosebush"], ["flower"], "any of many shrubs of the genus Rosa"),
    ("tulip", ["tulip"], ["flower"], "any of numerous perennial bulbous herbs"),
    ("woody_plant", ["woody_plant", "ligneous_plant"], ["vascular_plant"], "a plant having hard lignified tissues"),
    ("tree", ["tree"], ["woody_plant"], "a tall perennial woody plant"),
    ("palm", ["palm", "palm_tree"], ["tree"], "any plant of the family Palmae"),
    ("shrub", ["shrub", "bush"], ["woody_plant"], "a low woody perennial plant"),
    # matter and food
    ("matter", ["matter"], ["physical_entity"], "that which has mass and occupies space"),
    ("substance", ["substance"], ["matter"], "the real physical matter of which a person or thing consists"),
    ("fluid", ["fluid"], ["matter"], "a substance that is fluid at room temperature"),
    ("liquid", ["liquid"], ["fluid"], "a substance in the liquid state"),
    ("water", ["water", "h2o"], ["liquid"], "binary compound that occurs at room temperature as a clear liquid"),
    ("snow", ["snow"], ["substance"], "crystals of ice"),
    ("sand", ["sand"], ["substance"], "a loose material consisting of grains of rock"),
    ("food", ["food", "nutrient"], ["substance"], "any substance that can be metabolized"),
    ("beverage", ["beverage", "drink", "potable"], ["food", "liquid"], "any liquid suitable for drinking"),
    ("alcohol", ["alcohol", "alcoholic_drink"], ["beverage"], "a liquor or brew containing alcohol"),
    ("wine", ["wine", "vino"], ["alcohol"], "fermented juice of grapes"),
    ("beer", ["beer"], ["alcohol"], "a general name for alcoholic beverages made by fermenting a cereal"),
    ("dish", ["dish"], ["food"], "a particular item of prepared food"),
    ("pizza", ["pizza", "pizza_pie"], ["dish"], "Italian open pie made of thin bread dough"),
    ("sandwich", ["sandwich"], ["dish"], "two slices of bread with a filling between them"),
    ("produce", ["produce", "green_goods"], ["food"], "fresh fruits and vegetable grown for the market"),
    ("edible_fruit", ["edible_fruit"], ["produce"], "edible reproductive body of a seed plant"),
    ("apple", ["apple"], ["edible_fruit"], "fruit with red or yellow or green skin"),
    ("banana", ["banana"], ["edible_fruit"], "elongated crescent-shaped yellow fruit"),
    ("bread", ["bread", "breadstuff"], ["food"], "food made from dough of flour or meal"),
    ("cake", ["cake"], ["food"], "baked goods made from or based on a mixture of flour"),
    # places
    ("location", ["location"], ["physical_entity"], "a point or extent in space"),
    ("region", ["region"], ["location"], "the extended spatial location of something"),
    ("geographical_area", ["geographical_area", "geographic_area"], ["region"], "a demarcated area of the Earth"),
    ("tract", ["tract", "piece_of_land"], ["geographical_area"], "an extended area of land"),
    ("field", ["field"], ["tract"], "a piece of land cleared of trees"),
    ("park", ["park", "parkland"], ["tract"], "a large area of land preserved in its natural state"),
    ("garden", ["garden"], ["tract"], "a plot of ground where plants are cultivated"),
    ("urban_area", ["urban_area", "populated_area"], ["geographical_area"], "a geographical area constituting a city or town"),
    ("city", ["city", "metropolis"], ["urban_area"], "a large and densely populated urban area"),
    ("town", ["town"], ["urban_area"], "an urban area with a fixed boundary"),
    ("harbor", ["harbor", "harbour", "seaport"], ["geographical_area"], "a sheltered port"),
    ("sky", ["sky"], ["region"], "the atmosphere and outer space as viewed from the earth"),
    ("side", ["side"], ["region"], "a place within a region identified relative to a center"),
    ("top", ["top"], ["region"], "the upper part of anything"),
    ("geological_formation", ["geological_formation", "formation"], ["object"], "the geological features of the earth"),
    ("natural_elevation", ["natural_elevation", "elevation"], ["geological_formation"], "a raised or elevated geological formation"),
    ("mountain", ["mountain", "mount"], ["natural_elevation"], "a land mass that projects well above its surroundings"),
    ("hill", ["hill"], ["natural_elevation"], "a local and well-defined elevation of the land"),
    ("shore", ["shore"], ["geological_formation"], "the land along the edge of a body of water"),
    ("beach", ["beach"], ["shore"], "an area of sand sloping down to the water"),
    ("body_of_water", ["body_of_water", "water"], ["thing"], "the part of the earth's surface covered with water"),
    ("sea", ["sea"], ["body_of_water"], "a division of an ocean"),
    ("ocean", ["ocean"], ["body_of_water"], "a large body of water constituting a principal part of the hydrosphere"),
    ("lake", ["lake"], ["body_of_water"], "a body of water surrounded by land"),
    ("river", ["river"], ["stream"], "a large natural stream of water"),
    ("stream", ["stream", "watercourse"], ["body_of_water"], "a natural body of running water"),
    # abstractions
    ("attribute", ["attribute"], ["abstraction"], "an abstraction belonging to an entity"),
    ("property", ["property"], ["attribute"], "a basic or essential attribute"),
    ("visual_property", ["visual_property"], ["property"], "an attribute of vision"),
    ("color", ["color", "colour"], ["visual_property"], "a visual attribute of things"),
    ("chromatic_color", ["chromatic_color", "spectral_color"], ["color"], "a color that has hue"),
    ("red", ["red", "redness"], ["chromatic_color"], "red color or pigment"),
    ("blue", ["blue", "blueness"], ["chromatic_color"], "blue color or pigment"),
    ("green", ["green", "greenness"], ["chromatic_color"], "green color or pigment"),
    ("white", ["white", "whiteness"], ["color"], "the quality of being white"),
    ("shape", ["shape", "form"], ["attribute"], "the spatial arrangement of something"),
    ("measure", ["measure", "quantity", "amount"], ["abstraction"], "how much there is of something"),
    ("fundamental_quantity", ["fundamental_quantity"], ["measure"], "one of the four quantities that are the basis of systems of measurement"),
    ("time_period", ["time_period", "period"], ["fundamental_quantity"], "an amount of time"),
    ("day", ["day", "daytime", "daylight"], ["time_period"], "the time after sunrise and before sunset"),
    ("night", ["night", "nighttime", "dark"], ["time_period"], "the time after sunset and before sunrise"),
    ("morning", ["morning", "morn"], ["time_period"], "the time period between dawn and noon"),
    ("group", ["group", "grouping"], ["abstraction"], "any number of entities considered as a unit"),
    ("social_group", ["social_group"], ["group"], "people sharing some social relation"),
    ("gathering", ["gathering", "assemblage"], ["social_group"], "a group of persons together in one place"),
    ("crowd", ["crowd"], ["gathering"], "a large number of things or people considered together"),
    ("family", ["family", "household"], ["social_group"], "a social unit living together"),
    ("team", ["team", "squad"], ["social_group"], "a cooperative unit"),
    ("animal_group", ["animal_group"], ["group"], "a group of animals"),
    ("herd", ["herd"], ["animal_group"], "a group of cattle or sheep or other domestic mammals"),
    ("flock", ["flock"], ["animal_group"], "a group of birds"),
    ("psychological_feature", ["psychological_feature"], ["abstraction"], "a feature of the mental life of a living organism"),
    ("event", ["event"], ["psychological_feature"], "something that happens at a given place and time"),
    ("act", ["act", "deed", "human_action"], ["event"], "something that people do or cause to happen"),
    ("activity", ["activity"], ["act"], "any specific behavior"),
    ("game", ["game"], ["activity"], "a contest with rules to determine a winner"),
    ("race", ["race"], ["activity"], "any competition"),
    ("cognition", ["cognition", "knowledge"], ["psychological_feature"], "the psychological result of perception"),
    ("content", ["content", "mental_object"], ["cognition"], "the sum or range of what has been perceived"),
    ("idea", ["idea", "thought"], ["content"], "the content of cognition"),
    ("percept", ["percept", "perception"], ["cognition"], "the representation of what is perceived"),
    ("visual_percept", ["visual_percept", "visual_image"], ["percept"], "a percept that arises from the eyes"),
    ("scene", ["scene", "view", "aspect", "prospect", "vista"], ["visual_percept"], "the visual percept of a region"),
    ("communication", ["communication"], ["abstraction"], "something that is communicated by or to or between people"),
    ("sign", ["sign", "signboard"], ["communication"], "a public display of a message"),
    ("text", ["text", "textual_matter"], ["communication"], "the words of something written"),
    # instance hypernym example
    ("thames", ["thames", "river_thames"], [], "a river in southern England"),
]

INSTANCE_OF = {"thames": "river"}

def main():
    keys = [k for k, _, _, _ in TAXONOMY]
    assert len(keys) == len(set(keys)), "duplicate keys"
    entries = {k: (lem, par, gl) for k, lem, par, gl in TAXONOMY}
    children = {k: [] for k in keys}
    for k, (_, par, _) in entries.items():
        for p in par:
            assert p in entries, (k, p)
            children[p].append(k)
    for k, p in INSTANCE_OF.items():
        children[p].append(k)

    header = [
        "  1 Mini noun database in WordNet data.noun format.",
        "  2 Synset offsets are byte offsets into this file.",
        "  3 Structure mirrors a subset of the English noun hierarchy.",
    ]

    def line_for(k, off):
        lem, par, gl = entries[k]
        words = " ".join(f"{w} 0" for w in lem)
        ptrs = [f"@ {off[p]:08d} n 0000" for p in par]
        if k in INSTANCE_OF:
            ptrs.append(f"@i {off[INSTANCE_OF[k]]:08d} n 0000")
        ptrs += [f"~ {off[c]:08d} n 0000" for c in children[k] if c not in INSTANCE_OF]
        ptrs += [f"~i {off[c]:08d} n 0000" for c in children[k] if c in INSTANCE_OF]
        return f"{off[k]:08d} 03 n {len(lem):02x} {words} {len(ptrs):03d} {' '.join(ptrs)} | {gl}  ".replace("  | ", " | ")

    # offsets are fixed width, so a first pass with zeros gives exact lengths
    zero = {k: 0 for k in keys}
    pos = sum(len(h) + 1 for h in header)
    off = {}
    for k in keys:
        off[k] = pos
        pos += len(line_for(k, zero).encode()) + 1
    lines = header + [line_for(k, off) for k in keys]
    data = "\n".join(lines) + "\n"
    for k in keys:
        assert data.encode()[off[k]:off[k] + 8].decode() == f"{off[k]:08d}"
    with open("data.noun", "w") as f:
        f.write(data)

    index = {}
    for k in keys:
        for w in entries[k][0]:
            index.setdefault(w.lower(), []).append(k)
    out = list(header)
    for lemma in sorted(index):
        syns = index[lemma]
        ptr_types = set()
        for s in syns:
            if entries[s][1]:
                ptr_types.add("@")
            if s in INSTANCE_OF:
                ptr_types.add("@i")
            if any(c not in INSTANCE_OF for c in children[s]):
                ptr_types.add("~")
        pt = sorted(ptr_types)
        out.append(f"{lemma} n {len(syns)} {len(pt)} {' '.join(pt)}{' ' if pt else ''}{len(syns)} 0 "
                   + " ".join(f"{off[s]:08d}" for s in syns) + "  ")
    with open("index.noun", "w") as f:
        f.write("\n".join(out) + "\n")
    print(len(keys), "synsets,", len(index), "lemmas")

if __name__ == "__main__":
    main()
