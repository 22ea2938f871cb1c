// Embedded seed corpus for the built-in language-ID model. A few dozen
// sentences per language, mixing technical/patent register with general
// prose. Held-out evaluation sets live in the tests, not here.

#include "langid_data.hpp"

namespace patcorp {

const LangSeed kLangSeeds[] = {
    {"en",
     "A semiconductor device comprising a substrate, a gate electrode disposed over the "
     "substrate, and a dielectric layer between the gate electrode and a channel region. "
     "The apparatus further includes a controller configured to adjust the output voltage "
     "in response to a measured temperature of the housing. "
     "In one embodiment, the optical assembly includes a lens barrel, an image sensor, and "
     "an actuator for moving the lens relative to the sensor. "
     "The method comprises receiving a data stream, decoding the stream into frames, and "
     "storing the frames in a buffer memory for later retrieval. "
     "A fastening element engages the groove so that the panel is held against the frame "
     "without additional tools. "
     "The present invention relates generally to wireless communication systems and more "
     "particularly to scheduling of uplink transmissions. "
     "Water flows through the inlet valve into the mixing chamber where it is combined "
     "with the concentrate before being dispensed. "
     "The results show that the proposed approach reduces processing time while keeping "
     "accuracy within acceptable bounds for industrial use. "
     "Each of the plurality of battery cells is electrically connected in series with a "
     "monitoring circuit that reports the cell voltage. "
     "This chapter describes how the committee reviewed the evidence and reached its "
     "conclusions about the safety of the procedure. "
     "The weather was unusually warm for late October, and the leaves had only just begun "
     "to turn along the river. "
     "She opened the window and listened to the sound of the market below, where traders "
     "were already setting out their goods. "
     "A computer implemented method for detecting anomalies in network traffic using a "
     "trained statistical model and a sliding window. "
     "The spring biases the latch toward the locked position, and a cam surface releases "
     "the latch when the handle is rotated. "
     "Results from the field trial indicate that the coating prevents corrosion even "
     "after prolonged exposure to salt water."},
    {"de",
     "Eine Vorrichtung zur Messung der Temperatur eines Substrats, umfassend einen Sensor "
     "und eine Auswerteeinheit, die mit dem Sensor verbunden ist. "
     "Das Verfahren umfasst das Erfassen eines Messwerts, das Vergleichen des Messwerts "
     "mit einem Schwellenwert und das Ausgeben eines Steuersignals. "
     "Die Erfindung betrifft ein Gehäuse für elektronische Bauteile, das gegen Staub und "
     "Feuchtigkeit geschützt ist. "
     "In einer bevorzugten Ausführungsform ist der Aktor als Elektromotor ausgebildet, "
     "der über ein Getriebe mit der Welle gekoppelt ist. "
     "Der Deckel wird durch eine Feder in der geschlossenen Stellung gehalten und kann "
     "mit einem Hebel geöffnet werden. "
     "Die Steuerung passt die Ausgangsspannung in Abhängigkeit von der gemessenen "
     "Temperatur des Gehäuses an. "
     "Wasser fließt durch das Einlassventil in die Mischkammer, wo es vor der Abgabe mit "
     "dem Konzentrat vermischt wird. "
     "Die Ergebnisse zeigen, dass der vorgeschlagene Ansatz die Verarbeitungszeit "
     "verringert und zugleich die Genauigkeit beibehält. "
     "Jede der Batteriezellen ist in Reihe mit einer Überwachungsschaltung verbunden, "
     "welche die Zellspannung meldet. "
     "Das Wetter war für Ende Oktober ungewöhnlich warm, und die Blätter am Fluss hatten "
     "gerade erst begonnen, sich zu färben. "
     "Sie öffnete das Fenster und lauschte den Geräuschen des Marktes, auf dem die "
     "Händler bereits ihre Waren aufbauten. "
     "Ein computerimplementiertes Verfahren zur Erkennung von Anomalien im Netzwerkverkehr "
     "mittels eines trainierten statistischen Modells. "
     "Die Feder drückt die Klinke in die verriegelte Stellung, und eine Kurvenfläche gibt "
     "die Klinke frei, wenn der Griff gedreht wird. "
     "Nach längerer Einwirkung von Salzwasser verhindert die Beschichtung weiterhin die "
     "Korrosion der Oberfläche."},
    {"fr",
     "Un dispositif de mesure de la température d'un substrat comprenant un capteur et "
     "une unité d'évaluation reliée au capteur. "
     "Le procédé comprend l'acquisition d'une valeur de mesure, la comparaison de cette "
     "valeur avec un seuil et l'émission d'un signal de commande. "
     "L'invention concerne un boîtier pour composants électroniques protégé contre la "
     "poussière et l'humidité. "
     "Dans un mode de réalisation préféré, l'actionneur est un moteur électrique couplé à "
     "l'arbre par un réducteur. "
     "Le couvercle est maintenu en position fermée par un ressort et peut être ouvert à "
     "l'aide d'un levier. "
     "La commande ajuste la tension de sortie en fonction de la température mesurée du "
     "boîtier. "
     "L'eau s'écoule par la vanne d'entrée dans la chambre de mélange où elle est "
     "combinée au concentré avant la distribution. "
     "Les résultats montrent que l'approche proposée réduit le temps de traitement tout "
     "en conservant une précision acceptable. "
     "Chacune des cellules de batterie est reliée en série à un circuit de surveillance "
     "qui transmet la tension de la cellule. "
     "Le temps était exceptionnellement doux pour une fin d'octobre et les feuilles "
     "commençaient à peine à changer de couleur le long de la rivière. "
     "Elle ouvrit la fenêtre et écouta les bruits du marché où les commerçants "
     "installaient déjà leurs étals. "
     "Un procédé mis en œuvre par ordinateur pour détecter des anomalies dans le trafic "
     "réseau à l'aide d'un modèle statistique entraîné."},
    {"es",
     "Un dispositivo para medir la temperatura de un sustrato que comprende un sensor y "
     "una unidad de evaluación conectada al sensor. "
     "El método comprende adquirir un valor de medición, comparar dicho valor con un "
     "umbral y emitir una señal de control. "
     "La invención se refiere a una carcasa para componentes electrónicos protegida "
     "contra el polvo y la humedad. "
     "En una realización preferida, el actuador es un motor eléctrico acoplado al eje "
     "mediante un reductor. "
     "La tapa se mantiene cerrada por un resorte y puede abrirse con una palanca situada "
     "en el lateral. "
     "El controlador ajusta la tensión de salida en función de la temperatura medida de "
     "la carcasa. "
     "El agua fluye por la válvula de entrada hacia la cámara de mezcla donde se combina "
     "con el concentrado antes de dispensarse. "
     "Los resultados muestran que el enfoque propuesto reduce el tiempo de procesamiento "
     "manteniendo una precisión aceptable. "
     "Cada una de las celdas de la batería está conectada en serie con un circuito de "
     "supervisión que informa de la tensión. "
     "El tiempo era inusualmente cálido para finales de octubre y las hojas apenas "
     "comenzaban a cambiar de color junto al río. "
     "Ella abrió la ventana y escuchó los sonidos del mercado donde los comerciantes ya "
     "colocaban sus puestos. "
     "Un método implementado por ordenador para detectar anomalías en el tráfico de red "
     "mediante un modelo estadístico entrenado."},
    {"it",
     "Un dispositivo per misurare la temperatura di un substrato comprendente un sensore "
     "e un'unità di valutazione collegata al sensore. "
     "Il metodo comprende l'acquisizione di un valore di misura, il confronto di tale "
     "valore con una soglia e l'emissione di un segnale di comando. "
     "L'invenzione riguarda un involucro per componenti elettronici protetto contro la "
     "polvere e l'umidità. "
     "In una forma di realizzazione preferita, l'attuatore è un motore elettrico "
     "accoppiato all'albero tramite un riduttore. "
     "Il coperchio è mantenuto chiuso da una molla e può essere aperto con una leva "
     "posta sul lato. "
     "Il controllore regola la tensione di uscita in funzione della temperatura misurata "
     "dell'involucro. "
     "L'acqua scorre attraverso la valvola di ingresso nella camera di miscelazione dove "
     "viene combinata con il concentrato prima dell'erogazione. "
     "I risultati mostrano che l'approccio proposto riduce il tempo di elaborazione "
     "mantenendo una precisione accettabile. "
     "Ciascuna delle celle della batteria è collegata in serie a un circuito di "
     "monitoraggio che riporta la tensione della cella. "
     "Il tempo era insolitamente mite per la fine di ottobre e le foglie lungo il fiume "
     "cominciavano appena a cambiare colore. "
     "Lei aprì la finestra e ascoltò i rumori del mercato dove i commercianti stavano già "
     "allestendo i loro banchi."},
    {"nl",
     "Een inrichting voor het meten van de temperatuur van een substraat, omvattende een "
     "sensor en een evaluatie-eenheid die met de sensor is verbonden. "
     "De werkwijze omvat het verkrijgen van een meetwaarde, het vergelijken van de "
     "meetwaarde met een drempelwaarde en het afgeven van een stuursignaal. "
     "De uitvinding heeft betrekking op een behuizing voor elektronische componenten die "
     "beschermd is tegen stof en vocht. "
     "In een voorkeursuitvoering is de actuator een elektromotor die via een "
     "tandwielkast met de as is gekoppeld. "
     "Het deksel wordt door een veer in de gesloten stand gehouden en kan met een hendel "
     "worden geopend. "
     "De regelaar past de uitgangsspanning aan op basis van de gemeten temperatuur van "
     "de behuizing. "
     "Het water stroomt door het inlaatventiel naar de mengkamer waar het vóór de afgifte "
     "met het concentraat wordt gemengd. "
     "De resultaten tonen aan dat de voorgestelde aanpak de verwerkingstijd vermindert "
     "terwijl de nauwkeurigheid behouden blijft. "
     "Elk van de batterijcellen is in serie verbonden met een bewakingscircuit dat de "
     "celspanning rapporteert. "
     "Het weer was ongewoon warm voor eind oktober en de bladeren langs de rivier "
     "begonnen net te verkleuren. "
     "Zij opende het raam en luisterde naar de geluiden van de markt waar de kooplieden "
     "hun kramen al aan het opbouwen waren."},
};

const std::size_t kLangSeedCount = sizeof(kLangSeeds) / sizeof(kLangSeeds[0]);

}  // namespace patcorp
